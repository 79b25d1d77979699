"""Smoke test for the tca extension module.

Build it first:
    cargo build --release -p tca-py --features extension-module
    cp target/release/libtca.so python/tca.so
then run `python3 python/smoke.py` from the repository root.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))
import tca  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent

f1 = tca.Graph.from_json((ROOT / "crates/cli/tests/golden/f1.tca").read_text())
assert f1.kind == "chain", f1.kind

run = tca.schedule([f1], 10)
assert run.status == "ok", run
assert run.segments() == [
    ("f1", "a", "1", "2"),
    ("f1", "b", "2", "4"),
    ("f1", "c", "4", "5"),
    ("f1", "d", "7", "9"),
], run.segments()
assert tca.validate([f1], run) == []
assert run.gantt().splitlines()[1] == "f1    . a b b c . . d d ."
again = tca.Schedule.from_json(run.to_json())
assert again.to_json() == run.to_json()

assert tca.feasible([f1], 10)
assert f1.min_possible_deadline("c") == "7"

(periodic,) = tca.compile("agent p { loop { after(1); work(x, 1/2); before(1); } }")
assert periodic.kind == "automaton"
tree = periodic.unfold("5/2")
assert tree.kind == "tree" or tree.kind == "chain"

try:
    tca.compile("agent z { loop { work(x, 1); } }")
except ValueError as e:
    assert "1:11" in str(e), e
else:
    raise AssertionError("zeno program compiled")

sender, receiver = tca.compile(
    "agent s { work(s, 1); before(3); work(t, 1); }\n"
    "agent r { after(3); work(r, 1); }\n"
)
link = json.dumps(
    {"sender": {"agent": "s", "block": "s"}, "receiver": {"agent": "r", "block": "r"}, "visibility": 3}
)
ok, report = tca.check_visibility(link, [sender, receiver], 10)
assert ok, report

print("tca", tca.__version__, "smoke test passed")
