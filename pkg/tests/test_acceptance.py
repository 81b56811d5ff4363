"""Full-scale acceptance suite: one test per criterion, seed 0.

Each test prints ``criterion N PASS|FAIL <summary>`` even without ``-s``.
"""
import pytest

from bjorth import verify

pytestmark = pytest.mark.acceptance

SEED = 0
CHAIN_SPACES = {"C+C", "C+C+C", "M2", "M3", "C+M2", "M2+M2", "M3x2 over M2"}


@pytest.fixture(scope="module")
def report():
    return verify.run_suite(seed=SEED, scale=1.0)


@pytest.fixture
def announce(capsys):
    def emit(number, ok, summary):
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'} {summary}")
    return emit


def _criterion(report, number):
    (c,) = [c for c in report["criteria"] if c["number"] == number]
    return c


def _spaces(report, number):
    return _criterion(report, number)["metrics"]["spaces"]


def test_criterion_1_implication_chain(report, announce):
    sp = _spaces(report, 1)
    ok = (set(sp) == CHAIN_SPACES
          and all(s["samples"] == 11000 and s["chain_violations"] == 0 and s["errors"] == 0
                  and s["borderline_rate"] < 0.01 for s in sp.values()))
    worst = max(s["borderline_rate"] for s in sp.values())
    announce(1, ok and _criterion(report, 1)["passed"], f"violations=0 over {len(sp)} spaces, max borderline rate {worst:.2%}")
    assert ok and _criterion(report, 1)["passed"]


def test_criterion_2_commutative_strong_equals_quasi(report, announce):
    sp = _spaces(report, 2)
    ok = (set(sp) == {"C+C", "C+C+C", "C+C+C+C", "C+C+C+C+C"}
          and all(s["samples"] == 11000 and s["disagreements"] == 0 for s in sp.values()))
    announce(2, ok and _criterion(report, 2)["passed"], "100% agreement on C^2..C^5")
    assert ok and _criterion(report, 2)["passed"]


def test_criterion_3_separating_pair_noncommutative(report, announce):
    sp = _spaces(report, 3)
    commutative = {"C", "C+C", "C+C+C"}
    ok = all(sp[k].get("refused") for k in commutative)
    built = {k: v for k, v in sp.items() if k not in commutative}
    ok = ok and built and all(
        v["passed"] and not v["failures"] and v["max_quartic_failure_norm"] <= 0.25 + 1e-9 for v in built.values())
    worst = max(v["max_quartic_failure_norm"] for v in built.values())
    announce(3, ok and _criterion(report, 3)["passed"], f"{len(built)} algebras, quartic failure norm <= {worst:.12f}")
    assert ok and _criterion(report, 3)["passed"]


def test_criterion_4_prime_pair_and_max_norm(report, announce):
    c = _criterion(report, 4)
    sp = c["metrics"]["spaces"]
    multi = {k: v for k, v in sp.items() if not v.get("refused")}
    ok = (c["metrics"]["grid_points"] >= 100 and {"C+C", "C+C+C", "C+M2", "M2+M2"} <= set(multi)
          and all(not v["failures"] and v["max_deviation"] <= 1e-9 for v in multi.values()))
    worst = max(v["max_deviation"] for v in multi.values())
    announce(4, ok and c["passed"], f"max-norm formula deviation {worst:.1e}")
    assert ok and c["passed"]


def test_criterion_5_single_block_bj_equals_quasi(report, announce):
    sp = _spaces(report, 5)
    ok = (set(sp) == {"M2", "M3", "M4", "M3x2 over M2"}
          and all(s["samples"] == 11000 and s["disagreements"] == 0 for s in sp.values()))
    announce(5, ok and _criterion(report, 5)["passed"], "100% agreement on M2, M3, M4, M3x2 over M2")
    assert ok and _criterion(report, 5)["passed"]


def test_criterion_6_equivalence_survey(report, announce):
    m = _criterion(report, 6)["metrics"]
    ok = set(m["spaces"]) == {"C", "C+C", "M2", "C+M2", "M3"} and m["strong~bj_flagged"] == ["C"]
    announce(6, ok and _criterion(report, 6)["passed"], f"strong~bj flagged for {m['strong~bj_flagged']}")
    assert ok and _criterion(report, 6)["passed"]


def test_criterion_7_module_algebra_consistency(report, announce):
    sp = _spaces(report, 7)
    ok = set(sp) == CHAIN_SPACES and all(
        s["pairs"] == 2000 and s["agree"] == s["certified"] and s["borderline"] < 20 for s in sp.values())
    border = sum(s["borderline"] for s in sp.values())
    announce(7, ok and _criterion(report, 7)["passed"],
             f"all certified pairs consistent in {len(sp)} spaces ({border} borderline of {2000 * len(sp)})")
    assert ok and _criterion(report, 7)["passed"]


def test_criterion_8_numerical_range_engine(report, announce):
    m = _criterion(report, 8)["metrics"]
    ok = (m["random_matrices"] == 500 and m["oracle_vectors"] >= 100000 and m["contradictions"] == 0
          and m["normal_matrices"] == 100 and m["normal_mismatch_count"] == 0)
    announce(8, ok and _criterion(report, 8)["passed"], f"answers {m['answers']}, 0 contradictions, 0 normal mismatches")
    assert ok and _criterion(report, 8)["passed"]


def test_criterion_9_method_agreement(report, announce):
    sp = _spaces(report, 9)
    ok = set(sp) == CHAIN_SPACES and all(
        s["pairs"] == 2000 and s["agree"] == s["certified"] and s["borderline"] < 20 and s["max_gap"] <= 1e-7
        for s in sp.values())
    worst = max(s["max_gap"] for s in sp.values())
    border = sum(s["borderline"] for s in sp.values())
    announce(9, ok and _criterion(report, 9)["passed"],
             f"certified agreement 100% ({border} borderline), max gap {worst:.1e}")
    assert ok and _criterion(report, 9)["passed"]


def test_criterion_10_determinism(report, announce):
    second = verify.run_suite(seed=SEED, scale=1.0)
    first_bytes, second_bytes = verify.dumps(report), verify.dumps(second)
    ok = first_bytes == second_bytes
    announce(10, ok, f"two runs, {len(first_bytes)} bytes, identical={ok}")
    assert ok
