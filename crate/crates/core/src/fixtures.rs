//! Small reference graphs and programs used throughout the tests, the
//! acceptance suite and the documentation.

use crate::model::{Labeling, NodeKind, TcaGraph};
use crate::time::rat;

/// Absolute chain `>1 -a-> >2 -b-> <5 -c-> <>7 -d-> <10` with costs
/// 1, 2, 1, 2.
pub fn f1() -> TcaGraph {
    TcaGraph::new("f1", Labeling::Absolute, "n0")
        .with_node("n0", NodeKind::After(rat(1)))
        .with_node("n1", NodeKind::After(rat(2)))
        .with_node("n2", NodeKind::Before(rat(5)))
        .with_node("n3", NodeKind::Sync(rat(7)))
        .with_node("n4", NodeKind::Before(rat(10)))
        .with_arc("a", "n0", "n1", "a", rat(1))
        .with_arc("b", "n1", "n2", "b", rat(2))
        .with_arc("c", "n2", "n3", "c", rat(1))
        .with_arc("d", "n3", "n4", "d", rat(2))
}

/// [`f1`] relabeled relatively: `>1, >1, <3, <>5, <3`.
pub fn f3() -> TcaGraph {
    let mut g = f1();
    g.labeling = Labeling::Relative;
    let kinds = [
        NodeKind::After(rat(1)),
        NodeKind::After(rat(1)),
        NodeKind::Before(rat(3)),
        NodeKind::Sync(rat(5)),
        NodeKind::Before(rat(3)),
    ];
    for (n, k) in g.nodes.iter_mut().zip(kinds) {
        n.kind = k;
    }
    g
}

/// Tree `>0 -a-> C`, `C -b-> <6`, `C -c-> <7` with costs a=2, b=2, c=1.
pub fn f9() -> TcaGraph {
    TcaGraph::new("f9", Labeling::Absolute, "r")
        .with_node("r", NodeKind::After(rat(0)))
        .with_node("C", NodeKind::Plain)
        .with_node("B6", NodeKind::Before(rat(6)))
        .with_node("B7", NodeKind::Before(rat(7)))
        .with_arc("a", "r", "C", "a", rat(2))
        .with_arc("b", "C", "B6", "b", rat(2))
        .with_arc("c", "C", "B7", "c", rat(1))
}

/// Companion chain `>0 -d-> <3` with d=1.
pub fn f9d() -> TcaGraph {
    TcaGraph::new("f9d", Labeling::Absolute, "s")
        .with_node("s", NodeKind::After(rat(0)))
        .with_node("t", NodeKind::Before(rat(3)))
        .with_arc("d", "s", "t", "d", rat(1))
}

/// Single absolute chain `>0 -x-> <deadline` with the given cost.
pub fn single_block(name: &str, cost: i64, deadline: i64) -> TcaGraph {
    TcaGraph::new(name, Labeling::Absolute, "s")
        .with_node("s", NodeKind::After(rat(0)))
        .with_node("t", NodeKind::Before(rat(deadline)))
        .with_arc("x", "s", "t", "x", rat(cost))
}

/// Program whose automaton has blocks `a`, `b` and `c;d;e`: `b` must run
/// within a one-unit window and `c;d;e` within a five-unit window.
pub const F7_SOURCE: &str = "\
agent f7 {
  work(a, 1/2);
  loop {
    after(1);
    if choice { work(b, 1/2); before(1); }
    else      { work(c, 1); work(d, 1); work(e, 1); before(5); }
  }
}
";

/// Periodic task with deadline equal to its period.
pub const PERIODIC_SOURCE: &str = "agent p { loop { after(1); work(x, 1/2); before(1); } }\n";

/// A loop that never lets time advance.
pub const ZENO_SOURCE: &str = "agent z { loop { work(x, 1); } }\n";
