use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::constants::TriPairScalars;
use crate::linalg::{anticommutator, commutator, interior, max_abs, q_commutator, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Aw13,
    Aw20,
    Td33,
    QSerre27,
    BulkPasep,
    BulkSsep,
    Dg38,
    DgGeneric,
    Tasep65To77,
    Tasep85,
    Tasep86,
    Tasep88To90,
    Tasep93,
}

impl RelationKind {
    pub const ALL: [RelationKind; 13] = [
        RelationKind::Aw13,
        RelationKind::Aw20,
        RelationKind::Td33,
        RelationKind::QSerre27,
        RelationKind::BulkPasep,
        RelationKind::BulkSsep,
        RelationKind::Dg38,
        RelationKind::DgGeneric,
        RelationKind::Tasep65To77,
        RelationKind::Tasep85,
        RelationKind::Tasep86,
        RelationKind::Tasep88To90,
        RelationKind::Tasep93,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Aw13 => "AW13",
            RelationKind::Aw20 => "AW20",
            RelationKind::Td33 => "TD33",
            RelationKind::QSerre27 => "qSerre27",
            RelationKind::BulkPasep => "bulkPASEP",
            RelationKind::BulkSsep => "bulkSSEP",
            RelationKind::Dg38 => "DG38",
            RelationKind::DgGeneric => "DG-generic",
            RelationKind::Tasep65To77 => "TASEP65-77",
            RelationKind::Tasep85 => "TASEP85",
            RelationKind::Tasep86 => "TASEP86",
            RelationKind::Tasep88To90 => "TASEP88-90",
            RelationKind::Tasep93 => "TASEP93",
        }
    }

    /// Polynomial degree of the relation in its two matrices; also the
    /// block margin for truncated representations.
    pub fn degree(self) -> usize {
        match self {
            RelationKind::Aw13 | RelationKind::Aw20 | RelationKind::BulkPasep | RelationKind::BulkSsep => 3,
            RelationKind::Tasep85 | RelationKind::Tasep86 => 3,
            _ => 4,
        }
    }

    /// Names of the two matrices, in argument order.
    pub fn operands(self) -> (&'static str, &'static str) {
        match self {
            RelationKind::Aw13 | RelationKind::Aw20 | RelationKind::Td33 => ("A", "A*"),
            RelationKind::Dg38 | RelationKind::DgGeneric => ("A", "A*"),
            RelationKind::QSerre27 | RelationKind::BulkPasep | RelationKind::BulkSsep => ("D0", "D1"),
            RelationKind::Tasep65To77 | RelationKind::Tasep86 => ("D0", "D1"),
            RelationKind::Tasep85 => ("D", "D*"),
            RelationKind::Tasep88To90 => ("A", "B"),
            RelationKind::Tasep93 => ("DR", "DL"),
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownKind(s.into()))
    }
}

/// Which reading of a relation family to check. They differ for the
/// bulk families, where `Printed` keeps the coefficients as displayed
/// alongside the quadratic algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelationForm {
    #[default]
    Adopted,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResidual {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub kind: RelationKind,
    pub form: RelationForm,
    pub residuals: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.value))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

/// A relation written as a list of terms that sum to zero.
struct Terms<'a> {
    margin: usize,
    out: &'a mut Vec<RelationResidual>,
}

impl Terms<'_> {
    fn push(&mut self, name: &'static str, terms: &[Mat]) {
        self.push_with(name, terms, &[]);
    }

    /// `products` are the plain words behind a nested commutator; they
    /// only enter the scale, which is the size at which the cancellation
    /// happens.
    fn push_with(&mut self, name: &'static str, terms: &[Mat], products: &[Mat]) {
        let block = |m: &Mat| interior(m, self.margin);
        let mut sum = block(&terms[0]);
        let mut scale = max_abs(&sum);
        for t in &terms[1..] {
            let b = block(t);
            scale = scale.max(max_abs(&b));
            sum += b;
        }
        for p in products {
            scale = scale.max(max_abs(&block(p)));
        }
        let value = if scale == 0.0 { 0.0 } else { max_abs(&sum) / scale };
        self.out.push(RelationResidual { name, value });
    }
}

/// `uuuv, uuvu, uvuu, vuuu`.
fn quartic_words(u: &Mat, v: &Mat) -> [Mat; 4] {
    let uu = u * u;
    [&uu * u * v, &uu * v * u, u * v * &uu, v * &uu * u]
}

/// `uuv, uvu, vuu`.
fn triple_words(u: &Mat, v: &Mat) -> [Mat; 3] {
    [u * u * v, u * v * u, v * u * u]
}

fn need(kind: RelationKind, v: Option<f64>, name: &'static str) -> Result<f64> {
    v.ok_or(Error::MissingScalar { kind: kind.name(), name })
}

pub fn check_relations(
    kind: RelationKind,
    x: &Mat,
    y: &Mat,
    scalars: &TriPairScalars,
    q: f64,
    truncated: bool,
) -> Result<RelationReport> {
    check_relations_form(kind, RelationForm::Adopted, x, y, scalars, q, truncated)
}

/// Normalized residual of each defining relation of `kind` on the pair
/// `(x, y)` (see [`RelationKind::operands`]). With `truncated` the
/// residual is taken on the leading block that excludes the last
/// `degree` rows and columns.
pub fn check_relations_form(
    kind: RelationKind,
    form: RelationForm,
    x: &Mat,
    y: &Mat,
    s: &TriPairScalars,
    q: f64,
    truncated: bool,
) -> Result<RelationReport> {
    if !x.is_square() || x.shape() != y.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{kind} needs two square matrices of equal size, got {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    let n = x.nrows();
    let margin = if truncated { kind.degree() } else { 0 };
    if margin >= n {
        return Err(Error::DimensionMismatch(format!("{kind} needs more than {margin} rows after truncation")));
    }
    let uses_q =
        matches!(kind, RelationKind::Aw13 | RelationKind::Td33 | RelationKind::QSerre27 | RelationKind::BulkPasep);
    if uses_q && !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("{kind} needs q > 0, got {q}")));
    }
    let id = Mat::identity(n, n);
    let mut residuals = Vec::new();
    let mut r = Terms { margin, out: &mut residuals };
    let xy = x * y;
    let yx = y * x;
    match kind {
        RelationKind::Aw13 => {
            let (a, b) = (x, y);
            let rho = need(kind, s.rho, "rho")?;
            let rhos = need(kind, s.rho_star, "rho*")?;
            let om = need(kind, s.omega, "omega")?;
            let eta = need(kind, s.eta, "eta")?;
            let etas = need(kind, s.eta_star, "eta*")?;
            let c = q_commutator(a, b, q);
            r.push_with(
                "[[A,A*]_q,A]_q = -rho A* - omega A - eta",
                &[q_commutator(&c, a, q), b * rho, a * om, &id * eta],
                &triple_words(a, b),
            );
            r.push_with(
                "[A*,[A,A*]_q]_q = -rho* A - omega A* - eta*",
                &[q_commutator(b, &c, q), a * rhos, b * om, &id * etas],
                &triple_words(b, a),
            );
        }
        RelationKind::Aw20 => {
            let (a, b) = (x, y);
            let be = need(kind, s.beta_s, "beta")?;
            let g = need(kind, s.gamma_s, "gamma")?;
            let gs = need(kind, s.gamma_s_star, "gamma*")?;
            let rho = need(kind, s.rho, "rho")?;
            let rhos = need(kind, s.rho_star, "rho*")?;
            let om = need(kind, s.omega, "omega")?;
            let eta = need(kind, s.eta, "eta")?;
            let etas = need(kind, s.eta_star, "eta*")?;
            let (aa, bb) = (a * a, b * b);
            let ab = anticommutator(a, b);
            r.push(
                "A^2A* - beta AA*A + A*A^2 - gamma{A,A*} = rho A* + gamma* A^2 + omega A + eta",
                &[&aa * b, a * b * a * (-be), b * &aa, &ab * (-g), b * (-rho), &aa * (-gs), a * (-om), &id * (-eta)],
            );
            r.push(
                "A*^2A - beta A*AA* + AA*^2 - gamma*{A,A*} = rho* A + gamma A*^2 + omega A* + eta*",
                &[&bb * a, b * a * b * (-be), a * &bb, &ab * (-gs), a * (-rhos), &bb * (-g), b * (-om), &id * (-etas)],
            );
        }
        RelationKind::Td33 => {
            let (a, b) = (x, y);
            let rho = need(kind, s.rho, "rho")?;
            let rhos = need(kind, s.rho_star, "rho*")?;
            let i1 = q_commutator(a, &q_commutator(a, b, q), 1.0 / q);
            r.push_with(
                "[A,[A,[A,A*]_q]_{1/q}] = rho [A,A*]",
                &[commutator(a, &i1), commutator(a, b) * (-rho)],
                &quartic_words(a, b),
            );
            let i2 = q_commutator(b, &q_commutator(b, a, q), 1.0 / q);
            r.push_with(
                "[A*,[A*,[A*,A]_q]_{1/q}] = rho* [A*,A]",
                &[commutator(b, &i2), commutator(b, a) * (-rhos)],
                &quartic_words(b, a),
            );
        }
        RelationKind::QSerre27 => {
            let (d0, d1) = (x, y);
            let b = q + 1.0 / q;
            let (d00, d11) = (d0 * d0, d1 * d1);
            let c1 = d0 * &d11 - d1 * d0 * d1 * b + &d11 * d0;
            r.push_with("[D1, D0D1^2 - (q+1/q) D1D0D1 + D1^2D0] = 0", &[commutator(d1, &c1)], &quartic_words(d1, d0));
            let c0 = d1 * &d00 - d0 * d1 * d0 * b + &d00 * d1;
            r.push_with("[D0, D1D0^2 - (q+1/q) D0D1D0 + D0^2D1] = 0", &[commutator(d0, &c0)], &quartic_words(d0, d1));
        }
        RelationKind::BulkPasep => {
            let (d0, d1) = (x, y);
            let x0 = need(kind, s.x0, "x0")?;
            let x1 = -x0;
            let rq = libm::sqrt(q);
            let sg = (rq - 1.0 / rq) / rq;
            let ac = anticommutator(d0, d1);
            let c = q_commutator(d0, d1, q);
            r.push_with(
                "[D1,[D0,D1]_q]_q",
                &[
                    q_commutator(d1, &c, q),
                    &ac * (-x1 * sg),
                    d0 * (x1 * x1 / q),
                    d1 * (-x0 * x1 / q),
                    d1 * d1 * (x0 * sg),
                ],
                &triple_words(d1, d0),
            );
            let d0sq = match form {
                RelationForm::Adopted => -x1 * sg,
                RelationForm::Printed => x1 * sg,
            };
            r.push_with(
                "[[D0,D1]_q,D0]_q",
                &[q_commutator(&c, d0, q), &ac * (x0 * sg), d1 * (x0 * x0 / q), d0 * (-x0 * x1 / q), d0 * d0 * d0sq],
                &triple_words(d0, d1),
            );
        }
        RelationKind::BulkSsep => {
            let (d0, d1) = (x, y);
            let x0 = need(kind, s.x0, "x0")?;
            let x1 = -x0;
            let c = commutator(d0, d1);
            match form {
                RelationForm::Adopted => {
                    r.push_with(
                        "[D1,[D0,D1]] = x0x1 D1 - x1^2 D0",
                        &[commutator(d1, &c), d1 * (-x0 * x1), d0 * (x1 * x1)],
                        &triple_words(d1, d0),
                    );
                    r.push_with(
                        "[[D0,D1],D0] = x0x1 D0 - x0^2 D1",
                        &[commutator(&c, d0), d0 * (-x0 * x1), d1 * (x0 * x0)],
                        &triple_words(d0, d1),
                    );
                }
                RelationForm::Printed => {
                    let ac = anticommutator(d0, d1);
                    r.push_with(
                        "[D1,[D0,D1]] = x1{D0,D1} - x1^2 D0 + x0x1 D1 - x0 D1^2",
                        &[commutator(d1, &c), &ac * (-x1), d0 * (x1 * x1), d1 * (-x0 * x1), d1 * d1 * x0],
                        &triple_words(d1, d0),
                    );
                    r.push_with(
                        "[[D0,D1],D0] = -x0{D0,D1} - x0^2 D1 + x0x1 D0 - x1 D0^2",
                        &[commutator(&c, d0), &ac * x0, d1 * (x0 * x0), d0 * (-x0 * x1), d0 * d0 * x1],
                        &triple_words(d0, d1),
                    );
                }
            }
        }
        RelationKind::Dg38 | RelationKind::DgGeneric => {
            let (a, b) = (x, y);
            let (rho, rhos) = if kind == RelationKind::Dg38 {
                (need(kind, s.rho, "rho")?, need(kind, s.rho_star, "rho*")?)
            } else {
                let k = need(kind, s.k, "k")?;
                let ks = need(kind, s.k_star, "k*")?;
                (k * k, ks * ks)
            };
            let ab = commutator(a, b);
            let ba = -&ab;
            let i1 = commutator(a, &ab);
            r.push_with("[A,[A,[A,A*]]] = rho [A,A*]", &[commutator(a, &i1), &ab * (-rho)], &quartic_words(a, b));
            let i2 = commutator(b, &ba);
            r.push_with("[A*,[A*,[A*,A]]] = rho* [A*,A]", &[commutator(b, &i2), &ba * (-rhos)], &quartic_words(b, a));
        }
        RelationKind::Tasep65To77 => {
            let (d0, d1) = (x, y);
            let c = commutator(d0, d1);
            r.push("65: D1D0 = D1 + D0", &[yx.clone(), -d1, -d0]);
            r.push("66: D1D0D1 = D1^2 + D0D1", &[d1 * d0 * d1, -(d1 * d1), -&xy]);
            r.push("66: D0D1D0 = D0D1 + D0^2", &[d0 * d1 * d0, -&xy, -(d0 * d0)]);
            r.push("67: D1^2D0 = D1^2 + D1 + D0", &[d1 * d1 * d0, -(d1 * d1), -d1, -d0]);
            r.push("67: D1D0^2 = D1 + D0 + D0^2", &[d1 * d0 * d0, -d1, -d0, -(d0 * d0)]);
            r.push("68: D1D0D1 - D1^2D0 = [D0,D1]", &[d1 * d0 * d1, -(d1 * d1 * d0), -&c]);
            r.push("68: D0D1D0 - D1D0^2 = [D0,D1]", &[d0 * d1 * d0, -(d1 * d0 * d0), -&c]);
            r.push_with("69: [D1D0,D1] = [D0,D1]", &[commutator(&yx, d1), -&c], &[&yx * d1, d1 * &yx]);
            r.push_with("69: [D0,D1D0] = [D0,D1]", &[commutator(d0, &yx), -&c], &[d0 * &yx, &yx * d0]);
            r.push("70: D1[D0,D1] = [D0,D1]", &[d1 * &c, -&c]);
            r.push("70: [D0,D1]D0 = [D0,D1]", &[&c * d0, -&c]);
            let e0 = d0 - &id;
            let e1 = d1 - &id;
            r.push("shifted: E1E0 = 1", &[&e1 * &e0, -id.clone()]);
            r.push("73: E1E0E1 = E1", &[&e1 * &e0 * &e1, -&e1]);
            r.push("73: E0E1E0 = E0", &[&e0 * &e1 * &e0, -&e0]);
            r.push("74: E1^2E0 = E1", &[&e1 * &e1 * &e0, -&e1]);
            r.push("74: E1E0^2 = E0", &[&e1 * &e0 * &e0, -&e0]);
            r.push("75: E1E0E1 - E1^2E0 = 0", &[&e1 * &e0 * &e1, -(&e1 * &e1 * &e0)]);
            r.push("75: E0E1E0 - E1E0^2 = 0", &[&e0 * &e1 * &e0, -(&e1 * &e0 * &e0)]);
            r.push("76: E1[E0,E1] = 0", &[&e1 * &e0 * &e1, -(&e1 * &e1 * &e0)]);
            r.push("76: [E0,E1]E0 = 0", &[&e0 * &e1 * &e0, -(&e1 * &e0 * &e0)]);
            r.push("77: E1E0E1^2 - E1^2E0E1 = 0", &[&e1 * &e0 * &e1 * &e1, -(&e1 * &e1 * &e0 * &e1)]);
            r.push("77: E0^2E1E0 - E0E1E0^2 = 0", &[&e0 * &e0 * &e1 * &e0, -(&e0 * &e1 * &e0 * &e0)]);
        }
        RelationKind::Tasep85 => {
            let (d, ds) = (x, y);
            let e1 = need(kind, s.e1, "e1")?;
            let e2 = need(kind, s.e2, "e2")?;
            r.push("D*DD* = e1e2 D*", &[ds * d * ds, ds * (-e1 * e2)]);
            r.push("(D*)^2 = e2 D*", &[ds * ds, ds * (-e2)]);
        }
        RelationKind::Tasep86 => {
            let (d0, d1) = (x, y);
            let e2 = need(kind, s.e2, "e2")?;
            r.push("D1D0D1 = ab D1", &[d1 * d0 * d1, d1 * (-e2)]);
            r.push("D0D1D0 = ab D0", &[d0 * d1 * d0, d0 * (-e2)]);
        }
        RelationKind::Tasep88To90 => {
            let (a, b) = (x, y);
            let ct = need(kind, s.c_tilde, "c~")?;
            r.push("ABA = c~ A", &[a * b * a, a * (-ct)]);
            r.push("ABAB - BABA = c~ (AB - BA)", &[&xy * &xy, -(&yx * &yx), (&xy - &yx) * (-ct)]);
        }
        RelationKind::Tasep93 => {
            let e2 = need(kind, s.e2, "e2")?;
            r.push("DRDLDRDL - DLDRDLDR = alpha beta (DRDL - DLDR)", &[&xy * &xy, -(&yx * &yx), (&xy - &yx) * (-e2)]);
        }
    }
    Ok(RelationReport { kind, form, residuals })
}

/// Relation kinds whose adopted and printed readings differ.
pub fn has_printed_variant(kind: RelationKind) -> bool {
    matches!(kind, RelationKind::BulkPasep | RelationKind::BulkSsep)
}
