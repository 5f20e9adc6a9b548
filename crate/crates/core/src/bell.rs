//! Bipartite two-setting, two-outcome correlations: the singlet's joint
//! statistics, CHSH values, deterministic local strategies, and whether a
//! single global distribution reproduces a table of joint statistics.
//!
//! Outcome index 0 is `up` (value +1) and index 1 is `down` (value −1).

// Setting and outcome indices read better as plain loops over 0..2.
#![allow(clippy::needless_range_loop)]

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lp;
use crate::quantum::{born_probabilities, builtins, OutcomeLabel};

/// Tolerance for normalization, no-signalling and feasibility.
pub const TOL_TABLE: f64 = 1e-9;

/// Joint outcome probabilities `p[s][t]` for one pair of settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution(pub [[f64; 2]; 2]);

/// +1 for index 0, −1 for index 1.
pub fn value(index: usize) -> f64 {
    if index == 0 {
        1.0
    } else {
        -1.0
    }
}

impl JointDistribution {
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.0[s][t]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }

    pub fn p_same(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn p_different(&self) -> f64 {
        self.0[0][1] + self.0[1][0]
    }

    /// Expectation of the product of the two ±1 outcomes.
    pub fn correlation(&self) -> f64 {
        self.p_same() - self.p_different()
    }

    /// First party's probability of outcome `s`.
    pub fn first_marginal(&self, s: usize) -> f64 {
        self.0[s][0] + self.0[s][1]
    }

    /// Second party's probability of outcome `t`.
    pub fn second_marginal(&self, t: usize) -> f64 {
        self.0[0][t] + self.0[1][t]
    }
}

/// Joint statistics of the singlet with spin measured at polar angle `alpha`
/// on the first wing and `beta` on the second, both in the x-z plane.
/// Computed by the Born rule on the 4×4 composite.
pub fn singlet_joint(alpha: f64, beta: f64) -> JointDistribution {
    let state = builtins::singlet();
    let config = builtins::joint_spin("joint", alpha, beta);
    let dist = born_probabilities(&state, &config).expect("singlet and joint spin are both 4-dimensional");
    let names = ["up", "down"];
    let mut p = [[0.0; 2]; 2];
    for (s, a) in names.iter().enumerate() {
        for (t, b) in names.iter().enumerate() {
            let label = OutcomeLabel::pair(OutcomeLabel::atom(a), OutcomeLabel::atom(b));
            p[s][t] = dist.get(&label).expect("joint spin labels are (up|down, up|down)");
        }
    }
    JointDistribution(p)
}

/// Singlet correlation `E(α, β)`.
pub fn correlation(alpha: f64, beta: f64) -> f64 {
    singlet_joint(alpha, beta).correlation()
}

/// Two measurement angles per wing, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSettings {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl AngleSettings {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        AngleSettings { alice: [a, a_prime], bob: [b, b_prime] }
    }

    /// (0, π/2, π/4, 3π/4), where the singlet reaches |S| = 2√2.
    pub fn tsirelson() -> Self {
        use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        AngleSettings::new(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4)
    }

    pub fn is_finite(&self) -> bool {
        self.alice.iter().chain(&self.bob).all(|a| a.is_finite())
    }
}

/// CHSH combination `E00 − E01 + E10 + E11` of four correlations indexed
/// `[alice setting][bob setting]`.
pub fn chsh_combination(e: [[f64; 2]; 2]) -> f64 {
    e[0][0] - e[0][1] + e[1][0] + e[1][1]
}

/// CHSH value `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` of the singlet.
pub fn chsh_value(settings: &AngleSettings) -> f64 {
    let mut e = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            e[x][y] = correlation(settings.alice[x], settings.bob[y]);
        }
    }
    chsh_combination(e)
}

/// A deterministic local strategy: a ±1 value for each setting of each wing.
/// Doubles as one global assignment `(a, a′, b, b′)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LhvStrategy {
    pub alice: [i8; 2],
    pub bob: [i8; 2],
}

impl LhvStrategy {
    /// All 16 strategies. Bit 3 is `a`, bit 2 `a′`, bit 1 `b`, bit 0 `b′`;
    /// a set bit means −1.
    pub fn all() -> impl Iterator<Item = LhvStrategy> {
        (0u8..16).map(LhvStrategy::from_index)
    }

    pub fn from_index(k: u8) -> LhvStrategy {
        let v = |bit: u8| if k >> bit & 1 == 1 { -1 } else { 1 };
        LhvStrategy { alice: [v(3), v(2)], bob: [v(1), v(0)] }
    }

    pub fn index(&self) -> u8 {
        let b = |v: i8| u8::from(v < 0);
        b(self.alice[0]) << 3 | b(self.alice[1]) << 2 | b(self.bob[0]) << 1 | b(self.bob[1])
    }

    /// Outcome index (0 for +1) of a wing's setting.
    fn outcome(v: i8) -> usize {
        usize::from(v < 0)
    }

    /// Exact integer CHSH value of the strategy.
    pub fn chsh(&self) -> i32 {
        let [a0, a1] = self.alice.map(i32::from);
        let [b0, b1] = self.bob.map(i32::from);
        a0 * b0 - a0 * b1 + a1 * b0 + a1 * b1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LhvMax {
    /// Largest |S| over all deterministic strategies.
    pub max: f64,
    /// First strategy in enumeration order reaching `max`.
    pub witness: LhvStrategy,
    /// Every strategy with its CHSH value, in enumeration order.
    pub table: Vec<(LhvStrategy, i32)>,
}

/// Exhaustive search over the 16 deterministic strategies.
pub fn lhv_max_chsh() -> LhvMax {
    let table: Vec<(LhvStrategy, i32)> = LhvStrategy::all().map(|s| (s, s.chsh())).collect();
    let &(witness, best) = table
        .iter()
        .fold(None::<&(LhvStrategy, i32)>, |acc, e| match acc {
            Some(a) if a.1.abs() >= e.1.abs() => Some(a),
            _ => Some(e),
        })
        .expect("16 strategies");
    LhvMax { max: f64::from(best.abs()), witness, table }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BellError {
    #[error("malformed correlation table: {0}")]
    MalformedTable(String),
}

/// Joint statistics for all four setting pairs, indexed `[alice][bob]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTable {
    p: [[JointDistribution; 2]; 2],
}

impl CorrelationTable {
    /// Validates normalization, entry range and no-signalling within
    /// [`TOL_TABLE`].
    pub fn new(p: [[JointDistribution; 2]; 2]) -> Result<Self, BellError> {
        let bad = |m: String| Err(BellError::MalformedTable(m));
        for x in 0..2 {
            for y in 0..2 {
                let d = &p[x][y];
                if d.0.iter().flatten().any(|v| !v.is_finite() || *v < -TOL_TABLE || *v > 1.0 + TOL_TABLE) {
                    return bad(format!("setting pair ({x}, {y}) has an entry outside [0, 1]"));
                }
                if (d.total() - 1.0).abs() > TOL_TABLE {
                    return bad(format!("setting pair ({x}, {y}) sums to {}", d.total()));
                }
            }
        }
        for x in 0..2 {
            let gap = (p[x][0].first_marginal(0) - p[x][1].first_marginal(0)).abs();
            if gap > TOL_TABLE {
                return bad(format!("alice's marginal under setting {x} depends on bob's setting (gap {gap:e})"));
            }
        }
        for y in 0..2 {
            let gap = (p[0][y].second_marginal(0) - p[1][y].second_marginal(0)).abs();
            if gap > TOL_TABLE {
                return bad(format!("bob's marginal under setting {y} depends on alice's setting (gap {gap:e})"));
            }
        }
        Ok(CorrelationTable { p })
    }

    /// Singlet statistics at the given angles.
    pub fn from_singlet(settings: &AngleSettings) -> Self {
        let mut p = [[JointDistribution([[0.0; 2]; 2]); 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y] = singlet_joint(settings.alice[x], settings.bob[y]);
            }
        }
        CorrelationTable::new(p).expect("quantum statistics are normalized and no-signalling")
    }

    /// Point-mass statistics of one deterministic strategy.
    pub fn from_strategy(s: &LhvStrategy) -> Self {
        let mut p = [[JointDistribution([[0.0; 2]; 2]); 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y].0[LhvStrategy::outcome(s.alice[x])][LhvStrategy::outcome(s.bob[y])] = 1.0;
            }
        }
        CorrelationTable { p }
    }

    pub fn get(&self, x: usize, y: usize) -> &JointDistribution {
        &self.p[x][y]
    }

    pub fn correlations(&self) -> [[f64; 2]; 2] {
        let mut e = [[0.0; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                e[x][y] = self.p[x][y].correlation();
            }
        }
        e
    }

    pub fn chsh(&self) -> f64 {
        chsh_combination(self.correlations())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointExistence {
    pub exists: bool,
    /// Probability of each global assignment, indexed by
    /// [`LhvStrategy::index`], when one exists.
    pub witness: Option<[f64; 16]>,
    /// Total constraint violation left by the solver.
    pub residual: f64,
}

/// Decides whether one distribution over the 16 global assignments
/// `(a, a′, b, b′)` reproduces all four joint distributions of `table`.
pub fn joint_distribution_exists(table: &CorrelationTable) -> JointExistence {
    // One equality per (x, y, s, t): the mass of assignments giving outcome s
    // to alice's setting x and t to bob's setting y.
    let mut a = Vec::with_capacity(16);
    let mut b = Vec::with_capacity(16);
    for x in 0..2 {
        for y in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    let row = LhvStrategy::all()
                        .map(|g| {
                            let hit = LhvStrategy::outcome(g.alice[x]) == s && LhvStrategy::outcome(g.bob[y]) == t;
                            if hit {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    a.push(row);
                    b.push(table.p[x][y].0[s][t].max(0.0));
                }
            }
        }
    }
    let f = lp::phase_one(&a, &b);
    let exists = f.residual <= TOL_TABLE;
    let witness = exists.then(|| {
        let mut w = [0.0; 16];
        w.copy_from_slice(&f.x);
        w
    });
    JointExistence { exists, witness, residual: f.residual }
}

/// The statistics a global assignment distribution induces.
pub fn induced_table(weights: &[f64; 16]) -> [[JointDistribution; 2]; 2] {
    let mut p = [[JointDistribution([[0.0; 2]; 2]); 2]; 2];
    for g in LhvStrategy::all() {
        let w = weights[usize::from(g.index())];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y].0[LhvStrategy::outcome(g.alice[x])][LhvStrategy::outcome(g.bob[y])] += w;
            }
        }
    }
    p
}
