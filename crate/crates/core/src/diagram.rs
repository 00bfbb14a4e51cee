//! Text rendering of kets and block-structure grids.

use crate::algebra::{CVec, Scalar};
use crate::states::{digits_of, Partition, StateSet};

/// Renders a vector as a sum of computational-basis kets, e.g. `|000⟩ + |001⟩ − |011⟩`.
pub fn ket_string(v: &CVec, dims: &[usize]) -> String {
    let wide = dims.iter().any(|&d| d > 10);
    let mut out = String::new();
    for (k, (f, amp)) in v.nonzeros().enumerate() {
        let digits = digits_of(f, dims);
        let label: String = if wide {
            digits.iter().map(|d| format!("[{d}]")).collect()
        } else {
            digits.iter().map(|d| d.to_string()).collect()
        };
        let (neg, mag) = split_sign(amp);
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            if mag.is_real() {
                out.push_str(&format!("{mag}"));
            } else {
                out.push_str(&format!("({mag})"));
            }
        }
        out.push_str(&format!("|{label}⟩"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn split_sign(s: &Scalar) -> (bool, Scalar) {
    use num_traits::Signed;
    let neg = if s.re().is_zero_rat() { s.im().is_negative() } else { s.re().is_negative() };
    if neg {
        (true, -s)
    } else {
        (false, s.clone())
    }
}

trait ZeroRat {
    fn is_zero_rat(&self) -> bool;
}

impl ZeroRat for num_rational::BigRational {
    fn is_zero_rat(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DiagramError {
    #[error("grid rendering needs a partition with exactly two blocks, got {0}")]
    Shape(usize),
    #[error(transparent)]
    State(#[from] crate::states::StateError),
}

/// Occupancy of computational-basis cells in a two-block view: rows index the first
/// block's basis, columns the second's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub title: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `cells[r][c]` lists the states whose support contains that cell.
    pub cells: Vec<Vec<Vec<usize>>>,
    pub labels: Vec<String>,
}

fn basis_labels(dims: &[usize]) -> Vec<String> {
    let total: usize = dims.iter().product();
    (0..total).map(|k| digits_of(k, dims).iter().map(|d| d.to_string()).collect()).collect()
}

pub fn grid(s: &StateSet, p: &Partition) -> Result<Grid, DiagramError> {
    if p.len() != 2 {
        return Err(DiagramError::Shape(p.len()));
    }
    let merged = s.merge_parties(p)?;
    let block_dims: Vec<Vec<usize>> =
        p.blocks().iter().map(|b| b.iter().map(|&j| s.spec().dims()[j]).collect()).collect();
    let rows = basis_labels(&block_dims[0]);
    let cols = basis_labels(&block_dims[1]);
    let mut cells = vec![vec![Vec::new(); cols.len()]; rows.len()];
    for (i, st) in merged.states().iter().enumerate() {
        for (f, _) in st.vector.nonzeros() {
            cells[f / cols.len()][f % cols.len()].push(i);
        }
    }
    Ok(Grid {
        title: format!("{} in {}", s.provenance(), p.label(s.spec())),
        rows,
        cols,
        cells,
        labels: s.states().iter().map(|st| st.label.clone()).collect(),
    })
}

impl Grid {
    fn cell_text(&self, r: usize, c: usize) -> String {
        let ids = &self.cells[r][c];
        if ids.is_empty() {
            ".".into()
        } else {
            ids.iter().map(|&i| self.labels[i].as_str()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn to_ascii(&self) -> String {
        let mut out = format!("{}\n", self.title);
        if self.rows.is_empty() || self.cols.is_empty() {
            return out;
        }
        let head = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let width = (0..self.rows.len())
            .flat_map(|r| (0..self.cols.len()).map(move |c| (r, c)))
            .map(|(r, c)| self.cell_text(r, c).chars().count())
            .chain(self.cols.iter().map(|c| c.len()))
            .max()
            .unwrap_or(1);
        out.push_str(&" ".repeat(head));
        for c in &self.cols {
            out.push_str(&format!(" {c:>width$}"));
        }
        out.push('\n');
        for (r, label) in self.rows.iter().enumerate() {
            out.push_str(&format!("{label:>head$}"));
            for c in 0..self.cols.len() {
                out.push_str(&format!(" {:>width$}", self.cell_text(r, c)));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const CELL: usize = 48;
        const MARGIN: usize = 40;
        let w = MARGIN + CELL * self.cols.len() + 8;
        let h = MARGIN + CELL * self.rows.len() + 8;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"monospace\" font-size=\"11\">\n"
        );
        out.push_str(&format!("<title>{}</title>\n", escape(&self.title)));
        for (c, label) in self.cols.iter().enumerate() {
            let x = MARGIN + c * CELL + CELL / 2;
            out.push_str(&format!("<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", MARGIN - 8, escape(label)));
        }
        for (r, label) in self.rows.iter().enumerate() {
            let y = MARGIN + r * CELL + CELL / 2 + 4;
            out.push_str(&format!("<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{}</text>\n", MARGIN - 6, escape(label)));
            for c in 0..self.cols.len() {
                let (x, y0) = (MARGIN + c * CELL, MARGIN + r * CELL);
                let ids = &self.cells[r][c];
                let fill = match ids.first() {
                    Some(&i) => format!("hsl({}, 60%, 80%)", (i * 137) % 360),
                    None => "white".into(),
                };
                out.push_str(&format!(
                    "<rect x=\"{x}\" y=\"{y0}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"black\"/>\n"
                ));
                if !ids.is_empty() {
                    out.push_str(&format!(
                        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                        x + CELL / 2,
                        y0 + CELL / 2 + 4,
                        escape(&self.cell_text(r, c))
                    ));
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_named_set, NamedSet};

    #[test]
    fn s2_unfolds_to_three_by_six() {
        let s = build_named_set(NamedSet::S2, None).unwrap();
        let g = grid(&s, &Partition::parse("A|BC", s.spec()).unwrap()).unwrap();
        assert_eq!((g.rows.len(), g.cols.len()), (3, 6));
        assert!(g.to_svg().starts_with("<svg"));
    }

    #[test]
    fn domino_grid_is_covered() {
        let d = build_named_set(NamedSet::Domino, None).unwrap();
        let g = grid(&d, &Partition::finest(2)).unwrap();
        assert_eq!((g.rows.len(), g.cols.len()), (3, 3));
        assert!(g.cells.iter().flatten().all(|c| !c.is_empty()));
        assert_eq!(g.to_ascii().lines().count(), 5);
    }

    #[test]
    fn empty_set_gives_empty_grid() {
        let d = build_named_set(NamedSet::Domino, None).unwrap();
        let e = d.subset(&[]);
        let g = grid(&e, &Partition::finest(2)).unwrap();
        assert!(g.cells.iter().flatten().all(Vec::is_empty));
        let whole = Partition::new(vec![vec![0, 1]], 2).unwrap();
        assert!(matches!(grid(&d, &whole), Err(DiagramError::Shape(1))));
    }
}
