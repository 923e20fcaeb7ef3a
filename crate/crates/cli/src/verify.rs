use std::io::Write;

use indinet::oracle::{naive_determinant, naive_permanent};
use indinet::protocol::closed_form::closed_form_with_gram;
use indinet::protocol::{chain_gram, direct_probability, network_for, run_cascade, MeasurementMode, ProtocolKind};
use indinet::protocol::{NetworkSpec, Topology};
use indinet::{Scalar, ScalarMatrix, Statistics};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Failure;

const RANDOM_MATRICES_PER_DIM: usize = 20;
/// Beyond this the k! oracle sums dominate; larger sizes are covered by the
/// protocol Gram matrices.
const RANDOM_MAX_DIM: usize = 6;
const SEED: u64 = 0x01d1_57e7;

pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

struct Checker<'a, W: Write> {
    out: &'a mut W,
    summary: Summary,
}

impl<W: Write> Checker<'_, W> {
    fn check(&mut self, name: &str, detail: Result<(), String>) -> Result<(), Failure> {
        let line = match &detail {
            Ok(()) => {
                self.summary.passed += 1;
                format!("PASS {name}")
            }
            Err(why) => {
                self.summary.failed += 1;
                format!("FAIL {name}: {why}")
            }
        };
        writeln!(self.out, "{line}").map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn equal(label: &str, left: &Scalar, right: &Scalar) -> Result<(), String> {
    if left == right {
        Ok(())
    } else {
        Err(format!("{label}: {left} != {right}"))
    }
}

fn random_matrix(k: usize, rng: &mut ChaCha8Rng) -> ScalarMatrix {
    let palette = [
        Scalar::zero(),
        Scalar::one(),
        Scalar::from_ratio(1, 2),
        Scalar::from_ratio(-1, 2),
        Scalar::inv_sqrt2(),
        -Scalar::inv_sqrt2(),
        Scalar::one() + Scalar::sqrt2(),
    ];
    ScalarMatrix::from_fn(k, |_, _| palette.choose(rng).expect("non-empty").clone())
}

fn oracle_agreement(m: &ScalarMatrix) -> Result<(), String> {
    equal("det", &m.determinant(), &naive_determinant(m))?;
    let perm = m.permanent().map_err(|e| e.to_string())?;
    equal("perm", &perm, &naive_permanent(m))
}

/// Runs every check, printing one line each, and returns the tally.
pub fn run(n_max: usize, overlap: &Scalar, bound: usize, out: &mut impl Write) -> Result<Summary, Failure> {
    let mut c = Checker {
        out,
        summary: Summary { passed: 0, failed: 0 },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    for k in 1..=n_max.min(RANDOM_MAX_DIM) {
        let all = (0..RANDOM_MATRICES_PER_DIM)
            .map(|_| oracle_agreement(&random_matrix(k, &mut rng)))
            .collect::<Result<Vec<()>, _>>()
            .map(|_| ());
        c.check(&format!("oracle random k={k}"), all)?;
    }
    let half = Scalar::from_ratio(1, 2);
    for n in (4..=n_max).step_by(2) {
        c.check(&format!("oracle chain gram n={n}"), oracle_agreement(&chain_gram(n, &half)))?;
    }

    for n in (4..=n_max).step_by(2) {
        for kind in ProtocolKind::ALL {
            let gram = chain_gram(n, overlap);
            let closed = closed_form_with_gram(kind, n, &gram, bound);
            let direct = network_for(kind, n, Statistics::Fermion).and_then(|s| direct_probability(&s));
            let detail = match (closed, direct) {
                (Ok(a), Ok(b)) => equal("closed form vs direct", &a, &b),
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            };
            c.check(&format!("closed form {kind} n={n}"), detail)?;
        }
    }

    let trees = [
        (Topology::SharedChain, Statistics::Fermion),
        (Topology::SharedChain, Statistics::Boson),
        (Topology::Separated, Statistics::Fermion),
        (Topology::Separated, Statistics::Boson),
    ];
    for pairs in 2..=n_max / 2 {
        for (topology, stats) in trees {
            let detail = NetworkSpec::new(pairs, topology, stats)
                .and_then(|s| run_cascade(&s, MeasurementMode::Enumerate))
                .map_err(|e| e.to_string())
                .and_then(|r| {
                    equal("leaf probabilities", &r.total_branch_probability(), &Scalar::one())?;
                    if r.all_leaves_are_bell_states() {
                        Ok(())
                    } else {
                        Err("a leaf is not a Bell state".into())
                    }
                });
            let label = match topology {
                Topology::SharedChain => "shared",
                Topology::Separated => "separated",
            };
            c.check(&format!("tree {label} {} N={pairs}", stats.name()), detail)?;
        }
    }

    let s = &c.summary;
    writeln!(c.out, "{} passed, {} failed", s.passed, s.failed).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(c.summary)
}
