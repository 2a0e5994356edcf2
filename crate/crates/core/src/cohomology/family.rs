use crate::arith::ff::{poly_derivative, poly_gcd, poly_trim, Ext, FiniteField, Fp, Fq, Fqn};
use crate::arith::qq::{Qq, QqElem};
use crate::error::{Error, Result};

/// `Y^2 = Q̄(X, Γ)` over `F_q = F_p[x]/χ̄`, monic of odd degree `2g + 1` in
/// `X` with polynomial dependence of degree `κ` on `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFamily {
    p: u64,
    chibar: Vec<u64>,
    genus: usize,
    kappa: usize,
    /// `qbar[i][j]`: the `F_q` coefficient of `X^i Γ^j`.
    qbar: Vec<Vec<Vec<u64>>>,
}

impl CurveFamily {
    /// `terms` are `(i, j, c)` meaning `c X^i Γ^j`, with `c` given by its
    /// coordinates over `F_p`. Repeated monomials add up.
    pub fn new(p: u64, chibar: &[u64], terms: &[(usize, usize, Vec<u64>)]) -> Result<Self> {
        let fp = Fp::new(p)?;
        let fq = Fq::new(fp, chibar.iter().map(|c| c % p).collect())?;
        let a = fq.degree();
        let max_i = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let max_j = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut qbar = vec![vec![fq.zero(); max_j + 1]; max_i + 1];
        for (i, j, c) in terms {
            if c.len() > a {
                return Err(Error::InvalidInput(format!(
                    "coefficient of X^{i} Γ^{j} has {} coordinates, F_q has degree {a}",
                    c.len()
                )));
            }
            let mut v: Vec<u64> = c.iter().map(|x| x % p).collect();
            v.resize(a, 0);
            qbar[*i][*j] = fq.add(&qbar[*i][*j], &v);
        }
        let nonzero = |row: &Vec<Vec<u64>>| row.iter().any(|c| !fq.is_zero(c));
        while qbar.last().is_some_and(|row| !nonzero(row)) {
            qbar.pop();
        }
        let deg = qbar
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidInput("Q is zero".into()))?;
        if deg < 3 || deg % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "Q must have odd degree >= 3 in X, found {deg}"
            )));
        }
        let lead = &qbar[deg];
        if lead[0] != fq.one() || lead[1..].iter().any(|c| !fq.is_zero(c)) {
            return Err(Error::InvalidInput(
                "Q must be monic in X with constant leading coefficient 1".into(),
            ));
        }
        let kappa = qbar
            .iter()
            .flat_map(|row| row.iter().enumerate().filter(|(_, c)| !fq.is_zero(c)).map(|(j, _)| j))
            .max()
            .unwrap_or(0);
        for row in qbar.iter_mut() {
            row.resize(kappa + 1, fq.zero());
        }
        Ok(CurveFamily {
            p,
            chibar: fq.modulus().to_vec(),
            genus: (deg - 1) / 2,
            kappa,
            qbar,
        })
    }

    /// `Y^2 = X(X - 1)(X - Γ + 1) = X^3 - Γ X^2 + (Γ - 1) X` over `F_p`.
    pub fn legendre(p: u64) -> Result<Self> {
        let m1 = p - 1;
        CurveFamily::new(
            p,
            &[0, 1],
            &[
                (3, 0, vec![1]),
                (2, 1, vec![m1]),
                (1, 1, vec![1]),
                (1, 0, vec![m1]),
            ],
        )
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn a(&self) -> usize {
        self.chibar.len() - 1
    }
    pub fn chibar(&self) -> &[u64] {
        &self.chibar
    }
    pub fn genus(&self) -> usize {
        self.genus
    }
    pub fn kappa(&self) -> usize {
        self.kappa
    }
    /// Degree `2g + 1` in `X`.
    pub fn degree(&self) -> usize {
        2 * self.genus + 1
    }
    pub fn qbar(&self) -> &[Vec<Vec<u64>>] {
        &self.qbar
    }

    pub fn fq(&self) -> Fq {
        Ext::new_unchecked(Fp::new(self.p).expect("validated"), self.chibar.clone())
    }

    /// `(i, j, c)` triples of the nonzero coefficients.
    pub fn terms(&self) -> Vec<(usize, usize, Vec<u64>)> {
        let mut out = Vec::new();
        for (i, row) in self.qbar.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.iter().any(|&x| x != 0) {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }

    /// The fibre at `Γ = 0` as a constant family.
    pub fn at_zero(&self) -> CurveFamily {
        let qbar: Vec<Vec<Vec<u64>>> = self.qbar.iter().map(|row| vec![row[0].clone()]).collect();
        CurveFamily {
            p: self.p,
            chibar: self.chibar.clone(),
            genus: self.genus,
            kappa: 0,
            qbar,
        }
    }

    /// Centred lift of every coefficient: `[i][j]` for `X^i Γ^j`.
    pub fn lift(&self, qq: &Qq) -> Vec<Vec<QqElem>> {
        self.qbar
            .iter()
            .map(|row| row.iter().map(|c| qq.from_fq(c)).collect())
            .collect()
    }

    /// `Q̄(X, 0)` over `F_q`.
    pub fn base_fibre(&self) -> Vec<Vec<u64>> {
        self.qbar.iter().map(|row| row[0].clone()).collect()
    }

    /// Whether `Q̄(X, 0)` is squarefree.
    pub fn base_is_squarefree(&self) -> bool {
        let fq = self.fq();
        let f = poly_trim(&fq, self.base_fibre());
        let g = poly_gcd(&fq, &f, &poly_derivative(&fq, &f));
        g.len() == 1
    }

    /// Coefficients in `X` of `Q̄(X, γ̄)` for `γ̄ ∈ F_{q^n}`.
    pub fn eval_bar(&self, fqn: &Fqn, gamma: &[Vec<u64>]) -> Vec<Vec<Vec<u64>>> {
        self.qbar
            .iter()
            .map(|row| {
                let mut acc = fqn.zero();
                for c in row.iter().rev() {
                    acc = fqn.add(&fqn.mul(&acc, &gamma.to_vec()), &fqn.from_base(c));
                }
                acc
            })
            .collect()
    }
}
