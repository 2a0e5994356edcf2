//! `F_{p^d} = F_p[z]/m(z)` with elements as coordinate vectors, kept
//! separate from the tower arithmetic so that counts are independent of it.

/// A small prime-power field for enumeration.
#[derive(Clone, Debug)]
pub struct FlatField {
    p: u64,
    d: usize,
    /// `m_0..m_{d-1}` of the monic modulus.
    m: Vec<u64>,
}

impl FlatField {
    /// `modulus` lists `m_0..m_d` with `m_d = 1`; irreducibility is the
    /// caller's responsibility.
    pub fn new(p: u64, modulus: &[u64]) -> Self {
        let d = modulus.len() - 1;
        assert!(d >= 1 && modulus[d] == 1, "modulus must be monic of positive degree");
        assert!(p < 1 << 28, "prime too large for the enumeration field");
        FlatField {
            p,
            d,
            m: modulus[..d].iter().map(|c| c % p).collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.d
    }
    /// `p^d`, if it fits.
    pub fn size(&self) -> Option<u64> {
        self.p.checked_pow(self.d as u32)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.d]
    }
    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    /// The element with base-`p` digits of `idx` as coordinates.
    pub fn element(&self, mut idx: u64) -> Vec<u64> {
        let mut v = vec![0; self.d];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn index(&self, x: &[u64]) -> u64 {
        x.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(a, b)| (a + b) % self.p).collect()
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let (p, d) = (self.p, self.d);
        let mut w = vec![0u64; 2 * d - 1];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                w[i + j] = (w[i + j] + a * b) % p;
            }
        }
        for t in (d..2 * d - 1).rev() {
            let c = w[t];
            if c == 0 {
                continue;
            }
            for (j, &mj) in self.m.iter().enumerate() {
                w[t - d + j] = (w[t - d + j] + (p - mj) * c) % p;
            }
        }
        w.truncate(d);
        w
    }

    pub fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = x.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character by Euler's criterion: `0`, `1` or `−1`.
    pub fn chi(&self, x: &[u64]) -> i8 {
        if x.iter().all(|&c| c == 0) {
            return 0;
        }
        let size = self.size().expect("enumeration field fits in u64");
        let r = self.pow(x, (size - 1) / 2);
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// `Σ c_i x^i`.
    pub fn eval(&self, coeffs: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }
}
