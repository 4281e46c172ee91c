//! Binary channels and the information measures built on them.
//!
//! All measures are in bits.

use crate::error::{check_probability, Result};

/// Memoryless binary channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryChannel {
    /// P(out = 0 | in = 1).
    pub p10: f64,
    /// P(out = 1 | in = 0).
    pub p01: f64,
}

impl BinaryChannel {
    pub fn new(p10: f64, p01: f64) -> Result<Self> {
        Ok(BinaryChannel {
            p10: check_probability("p10", p10)?,
            p01: check_probability("p01", p01)?,
        })
    }

    pub const fn noiseless() -> Self {
        BinaryChannel { p10: 0.0, p01: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p10 == 0.0 && self.p01 == 0.0
    }

    /// P(out | input).
    #[inline]
    pub fn prob(&self, out: bool, input: bool) -> f64 {
        match (input, out) {
            (true, true) => 1.0 - self.p10,
            (true, false) => self.p10,
            (false, true) => self.p01,
            (false, false) => 1.0 - self.p01,
        }
    }

    /// Transition matrix indexed `[input][output]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p01, self.p01],
            [self.p10, 1.0 - self.p10],
        ]
    }

    /// The channel obtained by feeding this channel's output into `next`.
    pub fn then(&self, next: &BinaryChannel) -> BinaryChannel {
        let a = self.matrix();
        let b = next.matrix();
        let c = |i: usize, k: usize| a[i][0] * b[0][k] + a[i][1] * b[1][k];
        BinaryChannel {
            p10: c(1, 0),
            p01: c(0, 1),
        }
    }
}

#[inline]
fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy in bits, with 0·log 0 = 0.
pub fn binary_entropy(q: f64) -> Result<f64> {
    check_probability("q", q)?;
    Ok(plogp(q) + plogp(1.0 - q))
}

/// A divergence that may be infinite when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }
}

/// D(Bern(q) || Bern(r)) in bits.
pub fn kl_divergence_binary(q: f64, r: f64) -> Result<Divergence> {
    check_probability("q", q)?;
    check_probability("r", r)?;
    let term = |a: f64, b: f64| -> Option<f64> {
        if a == 0.0 {
            Some(0.0)
        } else if b == 0.0 {
            None
        } else {
            Some(a * (a / b).log2())
        }
    };
    match (term(q, r), term(1.0 - q, 1.0 - r)) {
        (Some(x), Some(y)) => Ok(Divergence::Finite((x + y).max(0.0))),
        _ => Ok(Divergence::Infinite),
    }
}

/// Entropy of an arbitrary finite pmf, in bits.
pub fn entropy(pmf: &[f64]) -> f64 {
    pmf.iter().copied().map(plogp).sum()
}

/// I(X;Y) of a 2×2 joint pmf indexed `[x][y]`.
pub fn mutual_information(joint: &[[f64; 2]; 2]) -> f64 {
    let px = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let py = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let hxy = entropy(&[joint[0][0], joint[0][1], joint[1][0], joint[1][1]]);
    (entropy(&px) + entropy(&py) - hxy).max(0.0)
}

/// Joint law of (U, Y, Z): Z is a true adjacency entry, U its copy in the
/// attacker's graph and Y the noisy response to a query about it. U and Y are
/// conditionally independent given Z.
#[derive(Clone, Debug, PartialEq)]
pub struct JointUYZ {
    /// Mass indexed `[u][y][z]`.
    pub table: [[[f64; 2]; 2]; 2],
    pub p: f64,
    /// Z → U.
    pub graph_channel: BinaryChannel,
    /// Z → Y.
    pub response_channel: BinaryChannel,
}

pub fn build_joint(
    p: f64,
    graph_channel: BinaryChannel,
    response_channel: BinaryChannel,
) -> Result<JointUYZ> {
    check_probability("p", p)?;
    let graph_channel = BinaryChannel::new(graph_channel.p10, graph_channel.p01)?;
    let response_channel = BinaryChannel::new(response_channel.p10, response_channel.p01)?;
    let mut table = [[[0.0; 2]; 2]; 2];
    for (u, plane) in table.iter_mut().enumerate() {
        for (y, row) in plane.iter_mut().enumerate() {
            for (z, cell) in row.iter_mut().enumerate() {
                let pz = if z == 1 { p } else { 1.0 - p };
                *cell = pz
                    * graph_channel.prob(u == 1, z == 1)
                    * response_channel.prob(y == 1, z == 1);
            }
        }
    }
    Ok(JointUYZ {
        table,
        p,
        graph_channel,
        response_channel,
    })
}

impl JointUYZ {
    #[inline]
    pub fn prob(&self, u: bool, y: bool, z: bool) -> f64 {
        self.table[u as usize][y as usize][z as usize]
    }

    /// (U, Y) marginal indexed `[u][y]`.
    pub fn uy_marginal(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (u, row) in out.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                *cell = self.table[u][y][0] + self.table[u][y][1];
            }
        }
        out
    }

    /// (Z, Y) marginal indexed `[z][y]`.
    pub fn zy_marginal(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (z, row) in out.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                *cell = self.table[0][y][z] + self.table[1][y][z];
            }
        }
        out
    }

    /// (U, Z) marginal indexed `[u][z]`.
    pub fn uz_marginal(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (u, row) in out.iter_mut().enumerate() {
            for (z, cell) in row.iter_mut().enumerate() {
                *cell = self.table[u][0][z] + self.table[u][1][z];
            }
        }
        out
    }

    pub fn p_u1(&self) -> f64 {
        let m = self.uy_marginal();
        m[1][0] + m[1][1]
    }

    pub fn p_y1(&self) -> f64 {
        let m = self.uy_marginal();
        m[0][1] + m[1][1]
    }

    pub fn entropy_u(&self) -> f64 {
        let q = self.p_u1();
        plogp(q) + plogp(1.0 - q)
    }

    pub fn entropy_y(&self) -> f64 {
        let q = self.p_y1();
        plogp(q) + plogp(1.0 - q)
    }

    pub fn mutual_information_zy(&self) -> f64 {
        mutual_information(&self.zy_marginal())
    }

    pub fn mutual_information_uz(&self) -> f64 {
        mutual_information(&self.uz_marginal())
    }

    /// P(Y = y | U = u) through the hidden Z; `None` when P(U = u) = 0.
    pub fn response_given_attacker_bit(&self, y: bool, u: bool) -> Option<f64> {
        let m = self.uy_marginal();
        let pu = m[u as usize][0] + m[u as usize][1];
        (pu > 0.0).then(|| m[u as usize][y as usize] / pu)
    }
}

/// I(U;Y) in bits.
pub fn mutual_information_uy(joint: &JointUYZ) -> f64 {
    mutual_information(&joint.uy_marginal())
}
