//! Hand-built models used by tests, documentation and the verification
//! suites. `fixtures/*.json` at the repository root are the serialized forms
//! of these constructors (a test pins them equal).

use crate::model::{ModelBuilder, ModelSpec};
use crate::scalar::rat;

/// The canonical worked example: one live state `s0` with a quit action
/// (`a1`: reward 1, absorb immediately) and a loiter action (`a2`: reward
/// 2/5, stay with probability 1/2).
///
/// Known closed forms, used as frozen oracles across the test suite:
/// always-`a1` has occupation mass {(s0,a1): 1}, performance 1, expected
/// absorption time 1; always-`a2` has mass {(s0,a2): 2}, performance 4/5,
/// time 2; the uniform mixture has masses {2/3, 2/3}, performance 14/15,
/// time 4/3. The achievable performance interval is [4/5, 1] and 14/15 is
/// achievable by no deterministic policy.
pub fn twostate() -> ModelSpec {
    ModelBuilder::new(1)
        .state("s0", false)
        .state("t", true)
        .action("s0", "a1", &[("t", rat(1, 1))], &[rat(1, 1)])
        .action(
            "s0",
            "a2",
            &[("s0", rat(1, 2)), ("t", rat(1, 2))],
            &[rat(2, 5)],
        )
        .eta(&[("s0", rat(1, 1))])
        .build()
}

/// A reachable sure-survival self-loop: choosing `stay` forever never
/// absorbs, so the model is not uniformly absorbing.
pub fn selfloop() -> ModelSpec {
    ModelBuilder::new(1)
        .state("s0", false)
        .state("t", true)
        .action("s0", "stay", &[("s0", rat(1, 1))], &[rat(0, 1)])
        .action("s0", "go", &[("t", rat(1, 1))], &[rat(0, 1)])
        .eta(&[("s0", rat(1, 1))])
        .build()
}

/// A three-state deterministic cycle with per-state exit actions; looping
/// survives forever, so the model is not uniformly absorbing and the witness
/// cycle has length three.
pub fn cycle3() -> ModelSpec {
    ModelBuilder::new(1)
        .state("c0", false)
        .state("c1", false)
        .state("c2", false)
        .state("t", true)
        .action("c0", "out", &[("t", rat(1, 1))], &[rat(0, 1)])
        .action("c0", "next", &[("c1", rat(1, 1))], &[rat(0, 1)])
        .action("c1", "out", &[("t", rat(1, 1))], &[rat(0, 1)])
        .action("c1", "next", &[("c2", rat(1, 1))], &[rat(0, 1)])
        .action("c2", "out", &[("t", rat(1, 1))], &[rat(0, 1)])
        .action("c2", "next", &[("c0", rat(1, 1))], &[rat(0, 1)])
        .eta(&[("c0", rat(1, 1))])
        .build()
}

/// Full escape mass: every action absorbs in one step, the strongest form of
/// uniform absorption (survival falls to zero immediately).
pub fn onestep() -> ModelSpec {
    ModelBuilder::new(1)
        .state("u0", false)
        .state("u1", false)
        .state("t", true)
        .action("u0", "a", &[("t", rat(1, 1))], &[rat(1, 1)])
        .action("u0", "b", &[("t", rat(1, 1))], &[rat(-1, 2)])
        .action("u1", "a", &[("t", rat(1, 1))], &[rat(3, 1)])
        .action("u1", "b", &[("t", rat(1, 1))], &[rat(0, 1)])
        .eta(&[("u0", rat(1, 2)), ("u1", rat(1, 2))])
        .build()
}

/// Initial distribution concentrated on the absorbing set: nothing is
/// reachable, every occupation measure is zero.
pub fn eta_on_delta() -> ModelSpec {
    ModelBuilder::new(1)
        .state("s0", false)
        .state("t", true)
        .action("s0", "a1", &[("t", rat(1, 1))], &[rat(1, 1)])
        .eta(&[("t", rat(1, 1))])
        .build()
}

/// A sure-survival loop that no policy can reach from η; the classifier must
/// ignore it (strategic measures never charge unreachable states).
pub fn unreachable_cycle() -> ModelSpec {
    ModelBuilder::new(1)
        .state("s0", false)
        .state("u", false)
        .state("t", true)
        .action("s0", "go", &[("t", rat(1, 1))], &[rat(1, 1)])
        .action("u", "loop", &[("u", rat(1, 1))], &[rat(0, 1)])
        .eta(&[("s0", rat(1, 1))])
        .build()
}
