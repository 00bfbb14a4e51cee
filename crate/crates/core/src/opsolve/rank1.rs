use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{CMat, CVec, Scalar};
use crate::states::StateSet;

use super::numeric::numeric_search;
use super::quadratic::{rational_sqrt, solve_quadratic, QuadraticRoots, Root};
use super::{GroupSystem, SolverConfig};

/// How a reported direction was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Exists exactly but needs a square root outside the Gaussian rationals.
    Algebraic(String),
    /// Found by the seeded heuristic; not verified exactly.
    Numeric,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => f.write_str("exact"),
            Exactness::Algebraic(d) => write!(f, "algebraic [{d}]"),
            Exactness::Numeric => f.write_str("numeric"),
        }
    }
}

/// A rank-1 orthogonality-preserving direction `θ` (group coordinates, up to scale).
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    /// Canonical exact vector (first nonzero coordinate 1) when available.
    pub vector: Option<CVec>,
    pub approx: Vec<(f64, f64)>,
    pub exactness: Exactness,
}

impl Direction {
    fn exact(v: CVec) -> Self {
        let v = v.canonical();
        let approx = v.entries().iter().map(Scalar::to_f64_pair).collect();
        Direction { vector: Some(v), approx, exactness: Exactness::Exact }
    }
}

/// Shape of a continuous family of solutions inside a cell `span(V)`.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// Every nonzero vector of the cell.
    Subspace,
    /// `V·(t, 1)` with `t = t0 + λ·d`, `λ` real.
    Line { t0: Scalar, d: Scalar },
    /// `V·(t, 1)` with `|t − center|² = r2`.
    Circle { center: Scalar, r2: BigRational },
    /// `V·y` with every residual form `Σ y_k·conj(y_l)·R[k][l]` vanishing; the exact
    /// zero set of a chart the case split could not parametrize. No representatives.
    Implicit { forms: Vec<CMat> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub kind: FamilyKind,
    /// Columns (group coordinates) spanning the cell.
    pub cell: Vec<CVec>,
    /// Exact members usable for building measurements.
    pub representatives: Vec<CVec>,
}

impl Family {
    pub fn describe(&self) -> String {
        let cell: Vec<String> = self.cell.iter().map(|c| c.to_string()).collect();
        match &self.kind {
            FamilyKind::Subspace => format!("every direction in span{{{}}}", cell.join(", ")),
            FamilyKind::Line { t0, d } => {
                format!("t*v1 + v2 with t = ({t0}) + s*({d}), s real; v = {}", cell.join(", "))
            }
            FamilyKind::Circle { center, r2 } => {
                format!("t*v1 + v2 with |t - ({center})|^2 = {r2}; v = {}", cell.join(", "))
            }
            FamilyKind::Implicit { forms } => {
                format!("zero set of {} residual forms on span{{{}}}", forms.len(), cell.join(", "))
            }
        }
    }

    /// Whether `theta` (group coordinates) belongs to the family.
    pub fn contains(&self, theta: &CVec) -> bool {
        let Ok(m) = CMat::from_columns(&self.cell) else { return false };
        let Some(y) = solve_in_span(&m, theta) else { return false };
        if y.is_zero() {
            return false;
        }
        match &self.kind {
            FamilyKind::Subspace => true,
            FamilyKind::Line { t0, d } => {
                let Some(t) = affine_parameter(&y) else { return false };
                let diff = &t - t0;
                (&diff * &d.conj()).im().is_zero()
            }
            FamilyKind::Circle { center, r2 } => {
                let Some(t) = affine_parameter(&y) else { return false };
                (&t - center).norm_sqr() == *r2
            }
            FamilyKind::Implicit { forms } => forms.iter().all(|r| quad_value(r, &y).is_zero()),
        }
    }
}

fn affine_parameter(y: &CVec) -> Option<Scalar> {
    let last = y.get(y.dim() - 1);
    if last.is_zero() {
        None
    } else {
        Some(y.get(0) / last)
    }
}

/// Coordinates `y` with `m·y = v`, if `v` lies in the column span of `m`.
fn solve_in_span(m: &CMat, v: &CVec) -> Option<CVec> {
    if m.rows() != v.dim() {
        return None;
    }
    let mut aug = CMat::zeros(m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols(), v.get(i).clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&m.cols()) {
        return None;
    }
    let mut y = CVec::zeros(m.cols());
    for (row, &pc) in pivots.iter().enumerate() {
        y.set(pc, r.get(row, m.cols()).clone());
    }
    Some(y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoneFound {
    pub method: String,
}

/// All rank-1 orthogonality-preserving directions of one group.
#[derive(Clone, Debug)]
pub struct SolutionReport {
    pub group: Vec<usize>,
    pub group_dim: usize,
    pub support_dim: usize,
    pub solutions: Vec<Direction>,
    pub families: Vec<Family>,
    /// Present only when the exact case split closed every cell without a solution.
    pub none_found: Option<NoneFound>,
    /// Every cell of the case split was resolved exactly.
    pub complete: bool,
    pub unresolved_cells: usize,
    pub numeric_seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub trace: Vec<String>,
}

impl SolutionReport {
    pub fn exact_directions(&self) -> Vec<CVec> {
        self.solutions
            .iter()
            .filter(|d| d.exactness == Exactness::Exact)
            .filter_map(|d| d.vector.clone())
            .collect()
    }

    /// Exact directions plus exact family representatives, deduplicated.
    pub fn usable_directions(&self) -> Vec<CVec> {
        let mut out = self.exact_directions();
        for f in &self.families {
            for r in &f.representatives {
                let c = r.canonical();
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Whether `theta` (group coordinates) is among the reported solutions.
    pub fn contains(&self, theta: &CVec) -> bool {
        let c = theta.canonical();
        self.solutions.iter().any(|d| d.vector.as_ref() == Some(&c)) || self.families.iter().any(|f| f.contains(theta))
    }

    pub fn is_exactly_empty(&self) -> bool {
        self.none_found.is_some()
    }
}

const MAX_CELLS: usize = 20_000;
const TRACE_LIMIT: usize = 200;

struct Solver<'a> {
    sys: &'a GroupSystem,
    points: Vec<CVec>,
    algebraic: Vec<(Vec<(f64, f64)>, String)>,
    families: Vec<(FamilyKind, CMat, Vec<CVec>)>,
    unresolved: Vec<CMat>,
    cells: usize,
    trace: Vec<String>,
}

/// Finds every `θ` in the occupied group subspace with `⟨ψᵢ|(|θ⟩⟨θ|⊗𝕀)|ψⱼ⟩ = 0` for all
/// pairs, by exact case splitting:
///
/// * a form of rank 1 factors as `(uᵀy)·conj(w̄ᵀy)` and splits the cell into two
///   linear sub-cells;
/// * otherwise the cell splits into its hyperplane `y_last = 0` and the affine chart
///   `y_last = 1`; with one free ratio the residual equations are linear in
///   `(|t|², Re t, Im t)` and are solved exactly (square roots when needed); with more
///   ratios the system is linearized in its monomials and resolved when that pins the
///   linear monomials.
///
/// Cells left open are handed to the seeded numeric search unless `exact_only` is set;
/// `none_found` is reported only when every cell closed exactly with no solution.
pub fn rank1_op_directions(s: &StateSet, group: &[usize], config: &SolverConfig) -> SolutionReport {
    let sys = GroupSystem::new(s, group);
    solve_system(&sys, config)
}

pub(crate) fn solve_system(sys: &GroupSystem, config: &SolverConfig) -> SolutionReport {
    let w = sys.support_dim();
    let mut solver =
        Solver { sys, points: vec![], algebraic: vec![], families: vec![], unresolved: vec![], cells: 0, trace: vec![] };
    solver.solve_cell(CMat::identity(w), 0);
    let mut solutions: Vec<Direction> = Vec::new();
    let push = |d: Direction, out: &mut Vec<Direction>| {
        if !out.iter().any(|e| e.vector.is_some() && e.vector == d.vector) {
            out.push(d);
        }
    };
    for x in &solver.points {
        push(Direction::exact(sys.lift(x)), &mut solutions);
    }
    let lifted_families: Vec<Family> = solver
        .families
        .iter()
        .map(|(kind, cell, reps)| Family {
            kind: kind.clone(),
            cell: cell.columns().iter().map(|c| sys.lift(c)).collect(),
            representatives: reps.iter().map(|r| sys.lift(r).canonical()).collect(),
        })
        .collect();
    // exact points already inside a family are kept; they are often the natural basis
    for (approx_x, desc) in &solver.algebraic {
        let approx = lift_approx(sys, approx_x);
        solutions.push(Direction { vector: None, approx, exactness: Exactness::Algebraic(desc.clone()) });
    }
    let complete = solver.unresolved.is_empty();
    let mut numeric_seed = None;
    let mut tolerance = None;
    if !complete && !config.exact_only {
        numeric_seed = Some(config.seed);
        tolerance = Some(config.tolerance);
        for (k, cell) in solver.unresolved.iter().enumerate() {
            let seed = config.seed.wrapping_add(k as u64);
            for found in numeric_search(sys, cell, seed, config) {
                match found {
                    Ok(exact_x) => push(Direction::exact(sys.lift(&exact_x)), &mut solutions),
                    Err(approx_x) => solutions.push(Direction {
                        vector: None,
                        approx: lift_approx(sys, &approx_x),
                        exactness: Exactness::Numeric,
                    }),
                }
            }
        }
    }
    solutions.sort_by(|a, b| match (&a.vector, &b.vector) {
        (Some(x), Some(y)) => x.canonical_cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let none_found = (complete && solutions.is_empty() && lifted_families.is_empty())
        .then(|| NoneFound { method: "exact-case-split".into() });
    SolutionReport {
        group: sys.group.clone(),
        group_dim: sys.group_dim,
        support_dim: w,
        solutions,
        families: lifted_families,
        none_found,
        complete,
        unresolved_cells: solver.unresolved.len(),
        numeric_seed,
        tolerance,
        trace: solver.trace,
    }
}

fn lift_approx(sys: &GroupSystem, x: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let b = &sys.basis;
    let mut out = Vec::with_capacity(b.rows());
    for i in 0..b.rows() {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, &(xr, xi)) in x.iter().enumerate() {
            let (br, bi) = b.get(i, k).to_f64_pair();
            re += br * xr - bi * xi;
            im += br * xi + bi * xr;
        }
        out.push((re, im));
    }
    // scale so the first non-negligible coordinate is 1
    if let Some(&(lr, li)) = out.iter().find(|(r, i)| r.hypot(*i) > 1e-12) {
        let n = lr * lr + li * li;
        out = out.iter().map(|&(r, i)| ((r * lr + i * li) / n, (i * lr - r * li) / n)).collect();
    }
    out
}

/// `Vᵀ·D·V̄`
fn restrict(d: &CMat, v: &CMat) -> CMat {
    v.transpose().mul(d).and_then(|x| x.mul(&v.conj())).expect("shapes")
}

/// Factor a rank-1 matrix as `u·wᵀ`.
fn rank_one_factors(m: &CMat) -> (CVec, CVec) {
    let l0 = (0..m.cols()).find(|&l| !m.column(l).is_zero()).expect("nonzero");
    let u = m.column(l0);
    let k0 = (0..m.rows()).find(|&k| !u.get(k).is_zero()).expect("nonzero");
    let inv = u.get(k0).inv().expect("nonzero");
    let w = CVec::new((0..m.cols()).map(|l| m.get(k0, l) * &inv).collect()).expect("cols >= 1");
    (u, w)
}

/// Basis (as columns of `V·N`) of `{V·y : cᵀy = 0}`.
fn kernel_cell(v: &CMat, c: &CVec) -> Option<CMat> {
    let row = CMat::from_rows(vec![c.entries().to_vec()]).expect("non-empty");
    let ns = row.nullspace();
    if ns.is_empty() {
        return None;
    }
    let n = CMat::from_columns(&ns).expect("non-empty");
    Some(v.mul(&n).expect("shapes"))
}

fn real(x: &BigRational) -> Scalar {
    Scalar::real(x.clone())
}

impl Solver<'_> {
    fn note(&mut self, msg: String) {
        if self.trace.len() < TRACE_LIMIT {
            self.trace.push(msg);
        }
    }

    fn solve_cell(&mut self, v: CMat, depth: usize) {
        self.cells += 1;
        if self.cells > MAX_CELLS {
            self.unresolved.push(v);
            return;
        }
        let k = v.cols();
        let mut forms: Vec<CMat> = Vec::new();
        for d in &self.sys.forms {
            let r = restrict(d, &v);
            if !r.is_zero() && !forms.iter().any(|f| f.to_vec().is_parallel(&r.to_vec())) {
                forms.push(r);
            }
        }
        if forms.is_empty() {
            if k == 1 {
                self.note(format!("{}point in cell of dim 1", indent(depth)));
                self.points.push(v.column(0));
            } else {
                self.note(format!("{}whole cell of dim {k} is a solution family", indent(depth)));
                let reps = orthogonal_basis(&v.columns());
                self.families.push((FamilyKind::Subspace, v, reps));
            }
            return;
        }
        if k == 1 {
            self.note(format!("{}dim-1 cell contradicted", indent(depth)));
            return;
        }
        if let Some(f) = forms.iter().find(|f| f.rank() == 1) {
            let (u, w) = rank_one_factors(f);
            self.note(format!("{}rank-1 form splits cell of dim {k}", indent(depth)));
            if let Some(c1) = kernel_cell(&v, &u) {
                self.solve_cell(c1, depth + 1);
            }
            if let Some(c2) = kernel_cell(&v, &w.conj()) {
                self.solve_cell(c2, depth + 1);
            }
            return;
        }
        // hyperplane y_last = 0
        let sub_cols: Vec<CVec> = (0..k - 1).map(|j| v.column(j)).collect();
        self.note(format!("{}cell of dim {k}: hyperplane + affine chart", indent(depth)));
        self.solve_cell(CMat::from_columns(&sub_cols).expect("non-empty"), depth + 1);
        if k == 2 {
            self.solve_affine_line(&v, &forms, depth + 1);
        } else {
            self.solve_affine_linearized(&v, &forms, depth + 1);
        }
    }

    /// `y = (t, 1)`: each form gives `α|t|² + β t + γ t̄ + δ = 0`.
    fn solve_affine_line(&mut self, v: &CMat, forms: &[CMat], depth: usize) {
        let mut rows = Vec::new();
        for r in forms {
            let (a, b, c, d) = (r.get(0, 0), r.get(0, 1), r.get(1, 0), r.get(1, 1));
            let p_coef = b + c;
            let q_coef = &Scalar::i() * &(b - c);
            rows.push(vec![real(a.re()), real(p_coef.re()), real(q_coef.re()), real(d.re())]);
            rows.push(vec![real(a.im()), real(p_coef.im()), real(q_coef.im()), real(d.im())]);
        }
        let (m, pivots) = CMat::from_rows(rows).expect("rect").rref();
        if pivots.contains(&3) {
            self.note(format!("{}affine chart inconsistent", indent(depth)));
            return;
        }
        let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
        // value of each of (s, p, q) as const + Σ coef·free
        let var = |col: usize| -> (BigRational, Vec<BigRational>) {
            if let Some(row) = pivots.iter().position(|&p| p == col) {
                let c = -m.get(row, 3).re().clone();
                let coefs = free.iter().map(|&f| -m.get(row, f).re().clone()).collect();
                (c, coefs)
            } else {
                let coefs = free.iter().map(|&f| if f == col { one() } else { BigRational::zero() }).collect();
                (BigRational::zero(), coefs)
            }
        };
        let (s, p, q) = (var(0), var(1), var(2));
        match free.len() {
            0 => {
                if s.0 == &p.0 * &p.0 + &q.0 * &q.0 {
                    self.note(format!("{}affine chart: single point", indent(depth)));
                    self.push_affine_point(v, Scalar::new(p.0, q.0));
                }
            }
            1 => {
                let (bp, bq, bs) = (&p.1[0], &q.1[0], &s.1[0]);
                let a2 = bp * bp + bq * bq;
                let a1 = two() * (&p.0 * bp + &q.0 * bq) - bs;
                let a0 = &p.0 * &p.0 + &q.0 * &q.0 - &s.0;
                match solve_quadratic(&a2, &a1, &a0) {
                    QuadraticRoots::All => {
                        let t0 = Scalar::new(p.0.clone(), q.0.clone());
                        let d = Scalar::new(bp.clone(), bq.clone());
                        if d.is_zero() {
                            self.push_affine_point(v, t0);
                        } else {
                            self.note(format!("{}affine chart: line family", indent(depth)));
                            let reps = vec![affine_vec(v, &t0), affine_vec(v, &(&t0 + &d))];
                            self.families.push((FamilyKind::Line { t0, d }, v.clone(), reps));
                        }
                    }
                    QuadraticRoots::Roots(roots) => {
                        for root in roots {
                            match root {
                                Root::Rational(l) => {
                                    let t = Scalar::new(&p.0 + bp * &l, &q.0 + bq * &l);
                                    self.push_affine_point(v, t);
                                }
                                surd => {
                                    let l = surd.approx();
                                    let t = (
                                        p.0.to_f64().unwrap_or(0.0) + bp.to_f64().unwrap_or(0.0) * l,
                                        q.0.to_f64().unwrap_or(0.0) + bq.to_f64().unwrap_or(0.0) * l,
                                    );
                                    self.note(format!("{}affine chart: irrational point", indent(depth)));
                                    self.push_algebraic(v, t, format!("parameter {}", surd.describe()));
                                }
                            }
                        }
                    }
                }
            }
            2 => {
                // a single equation e_s·s + e_p·p + e_q·q = e_0
                let row = &m.row(0);
                let (es, ep, eq, e0) =
                    (row[0].re().clone(), row[1].re().clone(), row[2].re().clone(), -row[3].re().clone());
                if es.is_zero() {
                    let (t0, d) = if !eq.is_zero() {
                        (Scalar::new(BigRational::zero(), &e0 / &eq), Scalar::new(one(), -(&ep / &eq)))
                    } else {
                        (Scalar::new(&e0 / &ep, BigRational::zero()), Scalar::i())
                    };
                    self.note(format!("{}affine chart: line family", indent(depth)));
                    let reps = vec![affine_vec(v, &t0), affine_vec(v, &(&t0 + &d))];
                    self.families.push((FamilyKind::Line { t0, d }, v.clone(), reps));
                } else {
                    let (al, be, ga) = (&ep / &es, &eq / &es, &e0 / &es);
                    let center = Scalar::new(-(&al / two()), -(&be / two()));
                    let r2 = ga + (&al * &al + &be * &be) / BigRational::from_integer(4.into());
                    if r2.is_negative() {
                        self.note(format!("{}affine chart: empty circle", indent(depth)));
                    } else if r2.is_zero() {
                        self.push_affine_point(v, center);
                    } else {
                        self.note(format!("{}affine chart: circle family", indent(depth)));
                        let reps = circle_points(&center, &r2).iter().map(|t| affine_vec(v, t)).collect();
                        self.families.push((FamilyKind::Circle { center, r2 }, v.clone(), reps));
                    }
                }
            }
            _ => {
                let reps = orthogonal_basis(&v.columns());
                self.families.push((FamilyKind::Subspace, v.clone(), reps));
            }
        }
    }

    /// `y = (t_0, …, t_{k−2}, 1)` with more than one free ratio: linearize in the real
    /// monomials and accept the chart only when the linear monomials are pinned.
    fn solve_affine_linearized(&mut self, v: &CMat, forms: &[CMat], depth: usize) {
        let k = v.cols();
        let n = k - 1;
        let mut quad_index = std::collections::HashMap::new();
        let mut next = 0;
        for a in 0..n {
            for b in a..n {
                quad_index.insert(('P', a, b), next);
                next += 1;
                quad_index.insert(('Q', a, b), next);
                next += 1;
            }
        }
        for a in 0..n {
            for b in 0..n {
                quad_index.insert(('M', a, b), next);
                next += 1;
            }
        }
        let lin_start = next;
        let pcol = |a: usize| lin_start + 2 * a;
        let qcol = |a: usize| lin_start + 2 * a + 1;
        let cols = lin_start + 2 * n + 1;
        let konst = cols - 1;
        let mut rows = Vec::new();
        for r in forms {
            let mut re = vec![BigRational::zero(); cols];
            let mut im = vec![BigRational::zero(); cols];
            let mut add = |c: &Scalar, x: &[(usize, i64)], y: &[(usize, i64)]| {
                // c·(X + iY): Re = Re c·X − Im c·Y, Im = Im c·X + Re c·Y
                for &(col, sgn) in x {
                    let sg = BigRational::from_integer(sgn.into());
                    re[col] += c.re() * &sg;
                    im[col] += c.im() * &sg;
                }
                for &(col, sgn) in y {
                    let sg = BigRational::from_integer(sgn.into());
                    re[col] -= c.im() * &sg;
                    im[col] += c.re() * &sg;
                }
            };
            for a in 0..n {
                for b in 0..n {
                    let c = r.get(a, b);
                    if c.is_zero() {
                        continue;
                    }
                    let (lo, hi) = (a.min(b), a.max(b));
                    let x = [(quad_index[&('P', lo, hi)], 1), (quad_index[&('Q', lo, hi)], 1)];
                    let y = [(quad_index[&('M', b, a)], 1), (quad_index[&('M', a, b)], -1)];
                    add(c, &x, &y);
                }
                let c = r.get(a, n);
                if !c.is_zero() {
                    add(c, &[(pcol(a), 1)], &[(qcol(a), 1)]);
                }
                let c = r.get(n, a);
                if !c.is_zero() {
                    add(c, &[(pcol(a), 1)], &[(qcol(a), -1)]);
                }
            }
            let c = r.get(n, n);
            add(c, &[(konst, 1)], &[]);
            if re.iter().any(|x| !x.is_zero()) {
                rows.push(re);
            }
            if im.iter().any(|x| !x.is_zero()) {
                rows.push(im);
            }
        }
        let mat = CMat::from_rows(rows.into_iter().map(|r| r.into_iter().map(Scalar::real).collect()).collect())
            .expect("rect");
        let (m, pivots) = mat.rref();
        if pivots.contains(&konst) {
            self.note(format!("{}affine chart of dim {n} inconsistent after linearization", indent(depth)));
            return;
        }
        let mut t = Vec::with_capacity(n);
        for a in 0..n {
            let mut parts = Vec::new();
            for col in [pcol(a), qcol(a)] {
                let Some(row) = pivots.iter().position(|&p| p == col) else {
                    return self.leave_open(v, forms, depth);
                };
                if (0..konst).any(|j| j != col && !m.get(row, j).is_zero()) {
                    return self.leave_open(v, forms, depth);
                }
                parts.push(-m.get(row, konst).re().clone());
            }
            t.push(Scalar::new(parts[0].clone(), parts[1].clone()));
        }
        let mut y = t;
        y.push(Scalar::one());
        let yv = CVec::new(y).expect("non-empty");
        if forms.iter().all(|r| quad_value(r, &yv).is_zero()) {
            self.note(format!("{}affine chart of dim {n}: single point", indent(depth)));
            self.points.push(v.mul_vec(&yv).expect("shape"));
        } else {
            self.note(format!("{}affine chart of dim {n}: pinned candidate rejected", indent(depth)));
        }
    }

    fn leave_open(&mut self, v: &CMat, forms: &[CMat], depth: usize) {
        self.note(format!("{}affine chart of dim {} left open", indent(depth), v.cols() - 1));
        self.unresolved.push(v.clone());
        self.families.push((FamilyKind::Implicit { forms: forms.to_vec() }, v.clone(), vec![]));
    }

    fn push_affine_point(&mut self, v: &CMat, t: Scalar) {
        self.points.push(affine_vec(v, &t));
    }

    fn push_algebraic(&mut self, v: &CMat, t: (f64, f64), desc: String) {
        let mut x = Vec::with_capacity(v.rows());
        for i in 0..v.rows() {
            let (ar, ai) = v.get(i, 0).to_f64_pair();
            let (br, bi) = v.get(i, 1).to_f64_pair();
            x.push((ar * t.0 - ai * t.1 + br, ar * t.1 + ai * t.0 + bi));
        }
        self.algebraic.push((x, desc));
    }
}

/// `Σ y_k·conj(y_l)·R[k][l]`
pub(crate) fn quad_value(r: &CMat, y: &CVec) -> Scalar {
    let mut acc = Scalar::zero();
    for (k, yk) in y.nonzeros() {
        for (l, yl) in y.nonzeros() {
            let c = r.get(k, l);
            if !c.is_zero() {
                acc += &(&(yk * &yl.conj()) * c);
            }
        }
    }
    acc
}

fn affine_vec(v: &CMat, t: &Scalar) -> CVec {
    v.column(0).scale(t).add(&v.column(1)).expect("shape")
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

fn two() -> BigRational {
    BigRational::from_integer(2.into())
}

fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

/// Exact Gram–Schmidt (no normalization).
pub(crate) fn orthogonal_basis(vectors: &[CVec]) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = e.inner(&w).expect("dim");
            if !c.is_zero() {
                let f = &c / &Scalar::real(e.norm_sqr());
                w = w.sub(&e.scale(&f)).expect("dim");
            }
        }
        if !w.is_zero() {
            out.push(w.canonical());
        }
    }
    out
}

/// A few rational points on the circle `|t − c|² = r2`, when any are easy to find.
fn circle_points(center: &Scalar, r2: &BigRational) -> Vec<Scalar> {
    let offsets: Vec<(BigRational, BigRational)> = if let Some(r) = rational_sqrt(r2) {
        vec![(r.clone(), BigRational::zero()), (-r.clone(), BigRational::zero()), (BigRational::zero(), r.clone()), (BigRational::zero(), -r)]
    } else {
        let mut found = Vec::new();
        'search: for den in 1i64..=12 {
            let bound = (r2.to_f64().unwrap_or(0.0).sqrt() * den as f64).ceil() as i64;
            for num in -bound..=bound {
                let a = BigRational::new(num.into(), den.into());
                let rest = r2 - &a * &a;
                if let Some(b) = rational_sqrt(&rest) {
                    found.push((a.clone(), b.clone()));
                    found.push((a, -b));
                    break 'search;
                }
            }
        }
        found
    };
    offsets.into_iter().map(|(a, b)| center + &Scalar::new(a, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_named_set, NamedSet};

    #[test]
    fn two_state_bell_pair_has_families() {
        let s = StateSet::from_kets(&[2, 2], &["00+11", "00-11"], "user").unwrap();
        let r = rank1_op_directions(&s, &[0], &SolverConfig::exact());
        assert!(r.complete);
        assert!(r.none_found.is_none());
        // |θ₀|² = |θ₁|²: the equator, never the computational basis
        assert!(r.contains(&CVec::from_ints(&[1, 1])));
        assert!(r.contains(&CVec::new(vec![Scalar::one(), Scalar::i()]).unwrap()));
        assert!(!r.contains(&CVec::from_ints(&[1, 0])));
    }

    #[test]
    fn domino_has_no_direction() {
        let d = build_named_set(NamedSet::Domino, None).unwrap();
        for g in [[0], [1]] {
            let r = rank1_op_directions(&d, &g, &SolverConfig::exact());
            assert!(r.none_found.is_some(), "{:?}", r.trace);
        }
    }

    #[test]
    fn family_membership() {
        let f = Family {
            kind: FamilyKind::Circle { center: Scalar::zero(), r2: BigRational::from_integer(1.into()) },
            cell: vec![CVec::from_ints(&[1, 0]), CVec::from_ints(&[0, 1])],
            representatives: vec![],
        };
        assert!(f.contains(&CVec::from_ints(&[1, 1])));
        assert!(f.contains(&CVec::new(vec![Scalar::i(), Scalar::from_int(1)]).unwrap()));
        assert!(!f.contains(&CVec::from_ints(&[2, 1])));
    }
}
