//! Deterministic and seeded-random test-matrix generators.
//!
//! The random stream is xoshiro256++ seeded through splitmix64 from an
//! explicit 64-bit seed, independent of platform libraries so runs replay
//! bit-identically everywhere. Uniforms take the top 53 bits
//! (`(x >> 11) * 2^-53`), entries on [-1, 1) are `2u - 1`, and off-diagonal
//! cells are drawn in row-major order; rows whose off-diagonal part comes
//! out entirely zero are redrawn.

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Matrix, NormalizedSystem, Vector};

/// xoshiro256++ with splitmix64 seeding.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = move || {
            sm = sm.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        Self {
            s: [next(), next(), next(), next()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = (self.s[0].wrapping_add(self.s[3]))
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform on [-1, 1).
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }
}

/// The three random test-matrix families: signed off-diagonals, all
/// off-diagonals flipped negative (nonnegative iteration matrix), and all
/// flipped positive (nonpositive iteration matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MatrixClass {
    Class1,
    Class2,
    Class3,
}

impl MatrixClass {
    pub fn label(&self) -> &'static str {
        match self {
            MatrixClass::Class1 => "class1",
            MatrixClass::Class2 => "class2",
            MatrixClass::Class3 => "class3",
        }
    }
}

impl std::str::FromStr for MatrixClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "class1" => Ok(MatrixClass::Class1),
            "2" | "class2" => Ok(MatrixClass::Class2),
            "3" | "class3" => Ok(MatrixClass::Class3),
            other => Err(Error::InvalidConfig(format!("unknown class: {other}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub n: usize,
    pub phi: f64,
    pub seed: u64,
    pub class: MatrixClass,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2".into()));
        }
        if self.phi.is_nan() || self.phi <= 0.0 {
            return Err(Error::InvalidConfig("phi must be positive".into()));
        }
        Ok(())
    }
}

/// Draw the off-diagonal entries (row-major, one shared draw for all three
/// classes), apply the class sign rule, then set the diagonal to
/// `(1/phi) * sum_j |a_ij|` and take `b = A*1` so the exact solution is the
/// all-ones vector.
pub fn generate(cfg: &GeneratorConfig) -> Result<LinearSystem> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = Rng::new(cfg.seed);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        loop {
            let mut row_abs_sum = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let draw = rng.symmetric();
                let v = match cfg.class {
                    MatrixClass::Class1 => draw,
                    MatrixClass::Class2 => -draw.abs(),
                    MatrixClass::Class3 => draw.abs(),
                };
                a.set(i, j, v);
                row_abs_sum += v.abs();
            }
            if row_abs_sum > 0.0 {
                a.set(i, i, row_abs_sum / cfg.phi);
                break;
            }
        }
    }
    let ones = vec![1.0; n];
    let b = Vector::from(a.matvec(&ones));
    LinearSystem::new(a, b)
}

/// Symmetric banded matrix with the 9-point stencil 1 4 1 4 16 4 1 4 1 on
/// offsets -4..=4; boundary rows truncate the stencil outside the index
/// range. `b = A*1`.
pub fn bspline_matrix(n: usize) -> Result<LinearSystem> {
    if n < 9 {
        return Err(Error::TooSmall {
            method: "bspline".into(),
            min_n: 9,
            n,
        });
    }
    const STENCIL: [f64; 9] = [1.0, 4.0, 1.0, 4.0, 16.0, 4.0, 1.0, 4.0, 1.0];
    let a = Matrix::from_fn(n, n, |i, j| {
        let off = j as i64 - i as i64;
        if (-4..=4).contains(&off) {
            STENCIL[(off + 4) as usize]
        } else {
            0.0
        }
    });
    let ones = vec![1.0; n];
    let b = Vector::from(a.matvec(&ones));
    LinearSystem::new(a, b)
}

/// The two fixed worked examples, as already-reduced systems with zero
/// right-hand side and unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedExample {
    /// 3x3 with a unit-modulus complex pair:
    /// gamma * [[0,-1,-1],[1/2,0,0],[0,1/2,0]], gamma = 1.241706082017.
    UnitCirclePair,
    /// The 2x2 swap [[0,1],[1,0]].
    Swap2,
}

pub const UNIT_CIRCLE_GAMMA: f64 = 1.241706082017;

pub fn fixed_example(which: FixedExample) -> NormalizedSystem {
    let bj = match which {
        FixedExample::UnitCirclePair => {
            let g = UNIT_CIRCLE_GAMMA;
            Matrix::new(
                3,
                3,
                vec![0.0, -g, -g, 0.5 * g, 0.0, 0.0, 0.0, 0.5 * g, 0.0],
            )
            .unwrap()
        }
        FixedExample::Swap2 => Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
    };
    NormalizedSystem::from_jacobi(&bj, Vector::zeros(bj.rows()))
        .expect("fixed example matrices are strictly hollow")
}

/// Strong connectivity of the support digraph (edge i -> j when the entry
/// (i, j) is nonzero): reachability from vertex 0 along edges and along
/// reversed edges.
pub fn is_irreducible(m: &Matrix) -> bool {
    let n = m.rows();
    if n == 0 || !m.is_square() {
        return false;
    }
    if n == 1 {
        return true;
    }
    let reach = |transpose: bool| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let edge = if transpose { m.at(w, v) } else { m.at(v, w) };
                if w != v && edge != 0.0 && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    };
    reach(false) && reach(true)
}
