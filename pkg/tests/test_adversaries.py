import numpy as np
import pytest

from conftest import random_inputs, small_params
from wiretap_ot.adversaries import AttackSpec, merge_views, psi
from wiretap_ot.analysis.montecarlo import run_trial
from wiretap_ot.analysis.residual import residual_min_entropy
from wiretap_ot.channel import ERASED
from wiretap_ot.protocols import replay_validate, run_session


def test_zero_swap_matches_honest_transcript():
    params = small_params("mal_le_half")
    honest = run_trial(params, AttackSpec(), 4, 0)
    swap0 = run_trial(params, AttackSpec("bob_swap", 0), 4, 0)
    assert swap0.transcript.dumps() == honest.transcript.dumps()


def test_swap_is_detected_and_replays():
    params = small_params("mal_le_half")
    attack = AttackSpec("bob_swap", 300)
    for i in range(5):
        out = run_trial(params, attack, 9, i)
        assert replay_validate(out) == []
        if out.views["bob"].state.get("swapped"):
            assert out.aborted and out.abort_party == "alice"


def test_swapping_bob_sees_eve():
    params = small_params("mal_le_half")
    out = run_trial(params, AttackSpec("bob_swap", 10), 1, 0)
    assert "Z" in out.views["bob"].observations


def test_pack_uses_only_known_positions():
    params = small_params("mal_gt_half")
    out = run_trial(params, AttackSpec("bob_pack"), 2, 0)
    packed = out.views["bob"].state["packed"]
    known = psi(out.views["bob"]) != ERASED
    assert packed.size == params.beta_n
    assert known[packed].all()
    assert replay_validate(out) == []


def test_probing_alice_skews_x():
    params = small_params("c2p")
    out = run_trial(params, AttackSpec("alice_probe", 0.9), 0, 0)
    assert out.views["alice"].state["X"].mean() > 0.85


@pytest.mark.parametrize("kind,strength,variant", [
    ("bob_swap", 5, "c2p"),
    ("bob_pack", 0, "mal_le_half"),
    ("bob_swap", 10 ** 6, "mal_le_half"),
])
def test_attack_variant_checks(kind, strength, variant):
    with pytest.raises(ValueError):
        AttackSpec(kind, strength).check(small_params(variant))


@pytest.mark.parametrize("kind,strength", [("nope", 0), ("bob_swap", -1), ("bob_swap", 1.5), ("alice_probe", 2)])
def test_attack_spec_validation(kind, strength):
    with pytest.raises(ValueError):
        AttackSpec(kind, strength)


def test_merge_views():
    params = small_params("c2p")
    out = run_session(params, random_inputs(params), 0)
    be = merge_views(out, {"bob", "eve"})
    assert set(be.observations) == {"Y", "Z"}
    assert set(be.state["seeds"]) == {"bob"}
    ab = merge_views(out, ["alice", "bob"])
    assert np.array_equal(ab.observations["X"], out.views["alice"].state["X"])
    assert ab.inputs["U"] == out.inputs.choice
    empty = merge_views(out, [])
    assert empty.observations == {} and len(empty.transcript) == 0
    with pytest.raises(ValueError):
        merge_views(out, {"mallory"})


def test_residual_matches_merged_view():
    params = small_params("c2p")
    out = run_session(params, random_inputs(params), 0)
    sel = np.arange(params.n)
    merged = psi(merge_views(out, {"bob", "eve"}))
    assert residual_min_entropy(out, {"bob", "eve"}, sel) == int(np.sum(merged == ERASED))
    assert residual_min_entropy(out, {"alice"}, sel) == 0
