//! Differential and bidifferential operators on a coordinate chart.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, Symbol};
use crate::rindler::RindlerMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("chart mismatch: expected {expected}, found {found}")]
    ChartMismatch { expected: String, found: String },
    #[error("pullback supports first-order operators only (found order {0})")]
    UnsupportedOrder(u32),
    #[error("bidifferential scalar must not depend on coordinates: {0}")]
    CoordinateScalar(String),
    #[error("coordinate index {0} out of range")]
    BadIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartKind {
    Minkowski,
    Rindler,
}

/// Coordinate chart: Minkowski `x0..x3` or Rindler `z0..z3`, signature (-,+,+,+).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chart {
    kind: ChartKind,
    accel: Option<Symbol>,
}

impl Chart {
    pub fn minkowski() -> Chart {
        Chart {
            kind: ChartKind::Minkowski,
            accel: None,
        }
    }

    /// Rindler chart with acceleration symbol `accel`.
    pub fn rindler(accel: &Symbol) -> Chart {
        Chart {
            kind: ChartKind::Rindler,
            accel: Some(accel.clone()),
        }
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn accel(&self) -> Option<&Symbol> {
        self.accel.as_ref()
    }

    pub fn prefix(&self) -> char {
        match self.kind {
            ChartKind::Minkowski => 'x',
            ChartKind::Rindler => 'z',
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ChartKind::Minkowski => "minkowski",
            ChartKind::Rindler => "rindler",
        }
    }

    pub fn coord(&self, mu: usize) -> Symbol {
        assert!(mu < 4, "coordinate index {mu} out of range");
        Symbol::new(&format!("{}{}", self.prefix(), mu)).expect("coordinate names are valid")
    }

    pub fn coord_expr(&self, mu: usize) -> Expr {
        Expr::symbol(&self.coord(mu))
    }

    pub fn coords(&self) -> [Symbol; 4] {
        [0, 1, 2, 3].map(|mu| self.coord(mu))
    }

    /// Diagonal of the metric `diag(-1, 1, 1, 1)`.
    pub fn eta(mu: usize) -> i64 {
        if mu == 0 {
            -1
        } else {
            1
        }
    }

    fn foreign_prefix(&self) -> char {
        match self.kind {
            ChartKind::Minkowski => 'z',
            ChartKind::Rindler => 'x',
        }
    }

    /// Fails when `e` mentions a coordinate of the other chart.
    pub fn check_expr(&self, e: &Expr) -> Result<(), DiffOpError> {
        let foreign = self.foreign_prefix();
        for s in e.free_symbols() {
            if is_coordinate_name(s.name()) && s.name().starts_with(foreign) {
                return Err(DiffOpError::ChartMismatch {
                    expected: self.to_string(),
                    found: format!("coordinate {}", s.name()),
                });
            }
        }
        Ok(())
    }

    fn same(&self, other: &Chart) -> Result<(), DiffOpError> {
        if self == other {
            Ok(())
        } else {
            Err(DiffOpError::ChartMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.accel {
            Some(a) => write!(f, "{}({})", self.name(), a),
            None => f.write_str(self.name()),
        }
    }
}

/// `x0..x3` and `z0..z3`.
pub fn is_coordinate_name(name: &str) -> bool {
    let b = name.as_bytes();
    b.len() == 2 && (b[0] == b'x' || b[0] == b'z') && (b'0'..=b'3').contains(&b[1])
}

/// Derivative orders per coordinate.
pub type MultiIndex = [u32; 4];

fn order_of(idx: &MultiIndex) -> u32 {
    idx.iter().sum()
}

fn unit_index(mu: usize) -> MultiIndex {
    let mut idx = [0; 4];
    idx[mu] = 1;
    idx
}

/// Finite sum `sum coeff * d^idx` with coefficients to the left of derivatives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffOp {
    chart: Chart,
    terms: BTreeMap<MultiIndex, Expr>,
}

impl DiffOp {
    pub fn zero(chart: &Chart) -> DiffOp {
        DiffOp {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(coeff, multi-index)` pairs, merging repeated indices.
    pub fn new(
        chart: &Chart,
        terms: impl IntoIterator<Item = (Expr, MultiIndex)>,
    ) -> Result<DiffOp, DiffOpError> {
        let mut op = DiffOp::zero(chart);
        for (c, idx) in terms {
            chart.check_expr(&c)?;
            op.add_term(c, idx);
        }
        op.normalize();
        Ok(op)
    }

    fn add_term(&mut self, c: Expr, idx: MultiIndex) {
        let slot = self.terms.entry(idx).or_insert_with(Expr::zero);
        *slot = &*slot + c;
    }

    fn normalize(&mut self) {
        let terms = std::mem::take(&mut self.terms);
        self.terms = terms
            .into_iter()
            .map(|(k, c)| (k, c.simplify()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
    }

    /// Multiplication by a function (order zero).
    pub fn multiplication(chart: &Chart, f: Expr) -> Result<DiffOp, DiffOpError> {
        DiffOp::new(chart, [(f, [0; 4])])
    }

    /// Plain partial derivative along coordinate `mu`.
    pub fn partial(chart: &Chart, mu: usize) -> Result<DiffOp, DiffOpError> {
        if mu >= 4 {
            return Err(DiffOpError::BadIndex(mu));
        }
        DiffOp::new(chart, [(Expr::one(), unit_index(mu))])
    }

    /// `P_mu = i d/d(coordinate mu)`.
    pub fn momentum(chart: &Chart, mu: usize) -> Result<DiffOp, DiffOpError> {
        Ok(DiffOp::partial(chart, mu)?.scale(&Expr::i()))
    }

    /// Lorentz generator `M_ab = i(eta_bb x_a d_b - eta_aa x_b d_a)` in the chart's own coordinates.
    pub fn lorentz(chart: &Chart, a: usize, b: usize) -> Result<DiffOp, DiffOpError> {
        if a >= 4 || b >= 4 {
            return Err(DiffOpError::BadIndex(a.max(b)));
        }
        let ca = Expr::int(Chart::eta(b)) * chart.coord_expr(a);
        let cb = -(Expr::int(Chart::eta(a)) * chart.coord_expr(b));
        Ok(DiffOp::new(chart, [(ca, unit_index(b)), (cb, unit_index(a))])?.scale(&Expr::i()))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    /// Coefficient of `d^idx`, zero if absent.
    pub fn coeff(&self, idx: &MultiIndex) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total derivative order.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(order_of).max().unwrap_or(0)
    }

    /// Multiply every coefficient by `s` from the left.
    pub fn scale(&self, s: &Expr) -> DiffOp {
        let mut out = DiffOp::zero(&self.chart);
        for (idx, c) in &self.terms {
            out.terms.insert(*idx, s * c);
        }
        out.normalize();
        out
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp, DiffOpError> {
        self.chart.same(&other.chart)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(c.clone(), *idx);
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp, DiffOpError> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// `sum coeff * d^idx f`, simplified.
    pub fn apply(&self, f: &Expr) -> Result<Expr, DiffOpError> {
        self.chart.check_expr(f)?;
        let coords = self.chart.coords();
        let terms = self.terms.iter().map(|(idx, c)| {
            let d = idx
                .iter()
                .zip(&coords)
                .fold(f.clone(), |acc, (n, v)| acc.diff_n(v, *n));
            c * d
        });
        Ok(Expr::sum(terms).simplify())
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let p = self.chart.prefix();
        let mut out = String::new();
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            let order = order_of(idx);
            let deriv = if order == 0 {
                String::new()
            } else {
                let mut den = String::new();
                for (mu, n) in idx.iter().enumerate() {
                    match n {
                        0 => {}
                        1 => den.push_str(&format!("d{p}{mu}")),
                        _ => den.push_str(&format!("d{p}{mu}^{n}")),
                    }
                }
                if order == 1 {
                    format!("d/{den}")
                } else {
                    format!("d^{order}/{den}")
                }
            };
            let coeff = c.to_string();
            let coeff = if matches!(c.node(), crate::expr::Node::Sum(_)) {
                format!("({coeff})")
            } else {
                coeff
            };
            let term = match (order, coeff.as_str()) {
                (0, _) => coeff.clone(),
                (_, "1") => deriv,
                (_, "-1") => format!("-{deriv}"),
                _ => format!("{coeff}*{deriv}"),
            };
            if k == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        f.write_str(&out)
    }
}

/// Rewrite a first-order Minkowski operator in Rindler coordinates via the chain rule.
pub fn pullback(d: &DiffOp, map: &RindlerMap) -> Result<DiffOp, DiffOpError> {
    Chart::minkowski().same(d.chart())?;
    let order = d.order();
    if order >= 2 {
        return Err(DiffOpError::UnsupportedOrder(order));
    }
    let chart = map.chart();
    let subst = map.substitution();
    let jac = map.inverse_jacobian();
    let mut terms = Vec::new();
    for (idx, c) in d.terms() {
        let c = c.substitute(&subst);
        match idx.iter().position(|n| *n == 1) {
            None => terms.push((c, [0; 4])),
            Some(mu) => {
                for (j, dz) in jac[mu].iter().enumerate() {
                    if !dz.is_zero() {
                        terms.push((&c * dz, unit_index(j)));
                    }
                }
            }
        }
    }
    DiffOp::new(&chart, terms)
}

/// Finite sum `sum scalar * (left (x) right)` of tensor-leg pairs.
///
/// Scalars are free of coordinates so deformation parameters stay visible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BidiffOp {
    chart: Chart,
    terms: BTreeMap<(DiffOp, DiffOp), Expr>,
}

impl BidiffOp {
    pub fn zero(chart: &Chart) -> BidiffOp {
        BidiffOp {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Single term `scalar * (left (x) right)`.
    pub fn tensor(scalar: Expr, left: &DiffOp, right: &DiffOp) -> Result<BidiffOp, DiffOpError> {
        left.chart.same(&right.chart)?;
        if scalar.free_symbols().iter().any(|s| is_coordinate_name(s.name())) {
            return Err(DiffOpError::CoordinateScalar(scalar.to_string()));
        }
        let mut op = BidiffOp::zero(&left.chart);
        if !left.is_zero() && !right.is_zero() {
            op.terms.insert((left.clone(), right.clone()), scalar);
        }
        op.normalize();
        Ok(op)
    }

    fn normalize(&mut self) {
        let terms = std::mem::take(&mut self.terms);
        self.terms = terms
            .into_iter()
            .map(|(k, c)| (k, c.simplify()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffOp, &DiffOp, &Expr)> {
        self.terms.iter().map(|((l, r), c)| (l, r, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &BidiffOp) -> Result<BidiffOp, DiffOpError> {
        self.chart.same(&other.chart)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let slot = out.terms.entry(k.clone()).or_insert_with(Expr::zero);
            *slot = &*slot + c;
        }
        out.normalize();
        Ok(out)
    }

    /// Multiply every scalar by a coordinate-free factor.
    pub fn scale(&self, s: &Expr) -> Result<BidiffOp, DiffOpError> {
        if s.free_symbols().iter().any(|v| is_coordinate_name(v.name())) {
            return Err(DiffOpError::CoordinateScalar(s.to_string()));
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = s * &*c;
        }
        out.normalize();
        Ok(out)
    }

    /// `mu . O (f (x) g) = sum scalar * (left f) * (right g)`, simplified.
    pub fn apply(&self, f: &Expr, g: &Expr) -> Result<Expr, DiffOpError> {
        self.chart.check_expr(f)?;
        self.chart.check_expr(g)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for ((l, r), c) in &self.terms {
            let lf = l.apply(f)?;
            if lf.is_zero() {
                continue;
            }
            let rg = r.apply(g)?;
            terms.push(Expr::product([c.clone(), lf, rg]));
        }
        Ok(Expr::sum(terms).simplify())
    }

    /// Pull both legs of a Minkowski operator back to the Rindler chart.
    pub fn pullback(&self, map: &RindlerMap) -> Result<BidiffOp, DiffOpError> {
        let mut out = BidiffOp::zero(&map.chart());
        for ((l, r), c) in &self.terms {
            let t = BidiffOp::tensor(c.clone(), &pullback(l, map)?, &pullback(r, map)?)?;
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Merged form `sum c_(I,J) d^I (x) d^J` with leg coefficients multiplied into one function.
    pub fn expanded(&self) -> BTreeMap<(MultiIndex, MultiIndex), Expr> {
        let mut out: BTreeMap<(MultiIndex, MultiIndex), Expr> = BTreeMap::new();
        for ((l, r), c) in &self.terms {
            for (li, lc) in l.terms() {
                for (ri, rc) in r.terms() {
                    let slot = out.entry((*li, *ri)).or_insert_with(Expr::zero);
                    *slot = &*slot + Expr::product([c.clone(), lc.clone(), rc.clone()]);
                }
            }
        }
        out.into_iter()
            .map(|(k, c)| (k, c.simplify()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// `A (x) B - B (x) A`.
pub fn wedge(a: &DiffOp, b: &DiffOp) -> Result<BidiffOp, DiffOpError> {
    BidiffOp::tensor(Expr::one(), a, b)?.add(&BidiffOp::tensor(Expr::int(-1), b, a)?)
}

/// Apply a bidifferential operator to a pair of functions.
pub fn bidiff_apply(o: &BidiffOp, f: &Expr, g: &Expr) -> Result<Expr, DiffOpError> {
    o.apply(f, g)
}

impl fmt::Display for BidiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, ((l, r), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c}) [{l}] (x) [{r}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equality_probe, parse};

    fn rindler() -> (RindlerMap, Chart) {
        let map = RindlerMap::standard();
        let chart = map.chart();
        (map, chart)
    }

    fn f0() -> DiffOp {
        let (map, _) = rindler();
        pullback(&DiffOp::momentum(&Chart::minkowski(), 0).unwrap(), &map).unwrap()
    }

    fn f1() -> DiffOp {
        let (map, _) = rindler();
        pullback(&DiffOp::momentum(&Chart::minkowski(), 1).unwrap(), &map).unwrap()
    }

    #[test]
    fn momentum_on_own_coordinate() {
        let (_, z) = rindler();
        let p2 = DiffOp::momentum(&z, 2).unwrap();
        assert_eq!(p2.apply(&Expr::sym("z2")).unwrap(), Expr::i());
        assert_eq!(p2.apply(&Expr::sym("z3")).unwrap(), Expr::zero());
    }

    #[test]
    fn rindler_generators_on_z0() {
        assert_eq!(
            f0().apply(&Expr::sym("z0")).unwrap(),
            parse("i*cosh(a*z0)/(a*z1)").unwrap()
        );
        assert_eq!(
            f1().apply(&Expr::sym("z0")).unwrap(),
            parse("-i*sinh(a*z0)/(a*z1)").unwrap()
        );
    }

    #[test]
    fn pullback_of_momenta_matches_closed_forms() {
        let (map, z) = rindler();
        let expected_f0 = DiffOp::new(
            &z,
            [
                (parse("-i*sinh(a*z0)").unwrap(), [0, 1, 0, 0]),
                (parse("i*cosh(a*z0)/(a*z1)").unwrap(), [1, 0, 0, 0]),
            ],
        )
        .unwrap();
        assert_eq!(f0(), expected_f0);
        let expected_f1 = DiffOp::new(
            &z,
            [
                (parse("i*cosh(a*z0)").unwrap(), [0, 1, 0, 0]),
                (parse("-i*sinh(a*z0)/(a*z1)").unwrap(), [1, 0, 0, 0]),
            ],
        )
        .unwrap();
        assert_eq!(f1(), expected_f1);
        let p2 = pullback(&DiffOp::momentum(&Chart::minkowski(), 2).unwrap(), &map).unwrap();
        assert_eq!(p2, DiffOp::momentum(&z, 2).unwrap());
    }

    #[test]
    fn boost_becomes_time_translation() {
        let (map, z) = rindler();
        let m01 = DiffOp::lorentz(&Chart::minkowski(), 0, 1).unwrap();
        let pulled = pullback(&m01, &map).unwrap();
        let expected = DiffOp::new(&z, [(parse("i/a").unwrap(), [1, 0, 0, 0])]).unwrap();
        assert_eq!(pulled, expected);
    }

    #[test]
    fn pretty_printer() {
        assert_eq!(
            f0().to_string(),
            "-i*sinh(a*z0)*d/dz1 + i*cosh(a*z0)/(a*z1)*d/dz0"
        );
        let m = Chart::minkowski();
        let d2 = DiffOp::new(&m, [(Expr::int(-1), [2, 0, 0, 0]), (Expr::sym("x1"), [0; 4])]).unwrap();
        assert_eq!(d2.to_string(), "x1 - d^2/dx0^2");
        let mixed = DiffOp::new(&m, [(Expr::sym("x2") + Expr::one(), [1, 1, 0, 0])]).unwrap();
        assert_eq!(mixed.to_string(), "(1 + x2)*d^2/dx0dx1");
    }

    #[test]
    fn pullback_obeys_chain_rule() {
        let (map, _) = rindler();
        let m = Chart::minkowski();
        let subst = map.substitution();
        let ops = [
            DiffOp::momentum(&m, 0).unwrap(),
            DiffOp::momentum(&m, 1).unwrap(),
            DiffOp::momentum(&m, 3).unwrap(),
            DiffOp::lorentz(&m, 0, 1).unwrap(),
            DiffOp::lorentz(&m, 0, 2).unwrap(),
            DiffOp::lorentz(&m, 1, 3).unwrap(),
            DiffOp::lorentz(&m, 2, 3).unwrap(),
            DiffOp::multiplication(&m, parse("x0*x2").unwrap()).unwrap(),
        ];
        let tests = [
            "x0^2*x1 + x2",
            "x0*x1*x3",
            "x1^3 - 2*x0*x2^2",
            "exp(x0)*x1",
        ];
        for d in &ops {
            let pd = pullback(d, &map).unwrap();
            for t in tests {
                let f = parse(t).unwrap();
                let lhs = pd.apply(&f.substitute(&subst)).unwrap();
                let rhs = d.apply(&f).unwrap().substitute(&subst);
                assert!(equality_probe(&lhs, &rhs, 20, 1e-10), "{d} on {t}");
            }
        }
    }

    #[test]
    fn pullback_rejects_second_order() {
        let (map, _) = rindler();
        let m = Chart::minkowski();
        let d = DiffOp::new(&m, [(Expr::one(), [2, 0, 0, 0])]).unwrap();
        assert_eq!(pullback(&d, &map), Err(DiffOpError::UnsupportedOrder(2)));
        let (_, z) = rindler();
        assert!(matches!(
            pullback(&DiffOp::partial(&z, 0).unwrap(), &map),
            Err(DiffOpError::ChartMismatch { .. })
        ));
    }

    #[test]
    fn apply_detects_chart_mismatch() {
        let p = DiffOp::momentum(&Chart::minkowski(), 0).unwrap();
        assert!(matches!(
            p.apply(&Expr::sym("z0")),
            Err(DiffOpError::ChartMismatch { .. })
        ));
        let (_, z) = rindler();
        assert!(matches!(
            p.add(&DiffOp::partial(&z, 0).unwrap()),
            Err(DiffOpError::ChartMismatch { .. })
        ));
        assert!(wedge(&p, &DiffOp::partial(&z, 0).unwrap()).is_err());
    }

    #[test]
    fn apply_is_linear() {
        let m = Chart::minkowski();
        let a = DiffOp::lorentz(&m, 1, 2).unwrap();
        let b = DiffOp::momentum(&m, 0).unwrap().scale(&Expr::sym("x3"));
        let f = parse("x1^2*x0 + x2*x3").unwrap();
        let g = parse("exp(x0)*x2").unwrap();
        let sum = a.add(&b).unwrap();
        assert_eq!(
            sum.apply(&f).unwrap(),
            (a.apply(&f).unwrap() + b.apply(&f).unwrap()).simplify()
        );
        let k = Expr::rational(3, 7);
        assert_eq!(
            a.apply(&(&f + &k * &g)).unwrap(),
            (a.apply(&f).unwrap() + &k * a.apply(&g).unwrap()).simplify()
        );
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let m = Chart::minkowski();
        let a = DiffOp::momentum(&m, 0).unwrap();
        let b = DiffOp::lorentz(&m, 2, 3).unwrap();
        assert!(wedge(&a, &a).unwrap().is_zero());
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert_eq!(ab, ba.scale(&Expr::int(-1)).unwrap());
        assert_eq!(ab.len(), 2);
        let c = DiffOp::momentum(&m, 1).unwrap();
        let lhs = wedge(&a.add(&c).unwrap(), &b).unwrap().expanded();
        let rhs = wedge(&a, &b).unwrap().add(&wedge(&c, &b).unwrap()).unwrap().expanded();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bidiff_apply_examples() {
        let m = Chart::minkowski();
        let p = |mu| DiffOp::momentum(&m, mu).unwrap();
        let x = |mu: usize| Expr::sym(&format!("x{mu}"));
        for mu in 0..4 {
            for nu in 0..4 {
                let t = BidiffOp::tensor(Expr::one(), &p(mu), &p(nu)).unwrap();
                for rho in 0..4 {
                    for sigma in 0..4 {
                        let v = bidiff_apply(&t, &x(rho), &x(sigma)).unwrap();
                        let expected = if mu == rho && nu == sigma { -1 } else { 0 };
                        assert_eq!(v, Expr::int(expected));
                    }
                }
            }
        }
        let w = wedge(&p(0), &p(1)).unwrap();
        assert_eq!(bidiff_apply(&w, &x(0), &x(1)).unwrap(), Expr::int(-1));
        assert_eq!(bidiff_apply(&w, &x(1), &x(0)).unwrap(), Expr::int(1));
        assert_eq!(bidiff_apply(&w, &x(0), &Expr::one()).unwrap(), Expr::zero());
        let with_mult = BidiffOp::tensor(
            Expr::one(),
            &p(0),
            &DiffOp::multiplication(&m, Expr::sym("x2")).unwrap(),
        )
        .unwrap();
        assert_eq!(
            bidiff_apply(&with_mult, &x(0), &Expr::one()).unwrap(),
            parse("i*x2").unwrap()
        );
    }

    #[test]
    fn scalars_must_be_coordinate_free() {
        let m = Chart::minkowski();
        let p = DiffOp::momentum(&m, 0).unwrap();
        assert!(matches!(
            BidiffOp::tensor(Expr::sym("x1"), &p, &p),
            Err(DiffOpError::CoordinateScalar(_))
        ));
        assert!(BidiffOp::tensor(Expr::sym("theta"), &p, &p).is_ok());
    }
}
