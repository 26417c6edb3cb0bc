import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtlforge.guidance import (
    Detector,
    DetectorKind,
    GateConfig,
    PassRateHistory,
    build_gate,
    enrich_spec,
    gate_features,
    gate_forward,
    gate_loss,
    gate_train,
    load_registry,
    make_synthetic_gate_dataset,
    select_config,
)
from rtlforge.nnet import zero_grads
from rtlforge.specs import Spec, route
from tests.gradcheck import fd_gradients, max_rel_error


def spec_of(description):
    return Spec(name="t", description=description)


class TestRegistry:
    def test_shipped_registry_shape(self):
        reg = load_registry()
        assert len(reg) >= 12
        assert len({d.priority for d in reg}) == len(reg)
        assert {d.kind for d in reg} == {DetectorKind.SEMANTIC, DetectorKind.FIXTURE_GROUNDED}
        bands = {d.band for d in reg}
        assert len(bands) == 5
        for d in reg:
            n_lines = d.guidance.count("\n") + 1
            assert 10 <= n_lines <= 200, f"{d.id}: {n_lines} lines"

    def test_registry_sorted_by_priority(self):
        reg = load_registry()
        assert list(reg) == sorted(reg, key=lambda d: d.priority)


class TestEnrich:
    def test_start_stop_bits_fire_serial_fsm(self):
        reg = load_registry()
        spec = spec_of("Receive bytes framed by a start bit and a stop bit at 9600 baud.")
        out = enrich_spec(spec, reg)
        assert "serial-frame-fsm" in out.fired
        assert "serial FSM" in out.spec.description

    def test_no_match_returns_spec_unchanged(self):
        reg = load_registry()
        spec = spec_of("Blink an output at one hertz from a 50 MHz clock input.")
        out = enrich_spec(spec, reg)
        assert out.fired == ()
        assert out.spec is spec

    def test_apb_interrupt_precedes_generic_priority(self):
        reg = load_registry()
        spec = spec_of("Build an APB slave interrupt controller with maskable interrupt lines.")
        out = enrich_spec(spec, reg)
        assert "apb-interrupt" in out.fired and "generic-priority" in out.fired
        assert out.fired.index("apb-interrupt") < out.fired.index("generic-priority")
        text = out.spec.description
        assert text.index("guidance: apb-interrupt") < text.index("guidance: generic-priority")

    def test_attention_precedes_matmul(self):
        reg = load_registry()
        spec = spec_of("Implement scaled dot-product attention using matrix multiplication units.")
        out = enrich_spec(spec, reg)
        assert out.fired.index("attention-op") < out.fired.index("matmul-op")

    def test_guidance_text_cannot_cascade(self):
        # detector a's brief contains b's trigger phrase; within one
        # enrichment pass b must not fire off that text
        reg = (
            Detector("a", 1, DetectorKind.SEMANTIC, {"phrase": "widget"},
                     "\n".join(["use a doohickey"] * 10)),
            Detector("b", 2, DetectorKind.SEMANTIC, {"phrase": "doohickey"},
                     "\n".join(["irrelevant"] * 10)),
        )
        out = enrich_spec(spec_of("make me a widget"), reg)
        assert out.fired == ("a",)

    def test_original_text_preserved_as_prefix(self):
        reg = load_registry()
        desc = "Decode Sony IR remote frames from sirc input."
        out = enrich_spec(spec_of(desc), reg)
        assert out.fired
        assert out.spec.description.startswith(desc)

    @settings(max_examples=60, deadline=None)
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=300))
    def test_length_grows_iff_fired(self, text):
        spec = Spec(name="t", description=text if text.strip() else "x")
        out = enrich_spec(spec, load_registry())
        grew = len(out.spec.description) > len(spec.description)
        assert grew == bool(out.fired)


class TestGateForward:
    def test_zero_gate_outputs_half(self):
        gate = build_gate(rng=None)
        probs = gate_forward(np.zeros(20), gate)
        assert np.allclose(probs, 0.5)

    def test_shape_mismatch_rejected(self):
        gate = build_gate()
        with pytest.raises(ValueError):
            gate_forward(np.zeros(19), gate)

    def test_outputs_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(3)
        gate = build_gate(rng)
        for _ in range(50):
            probs = gate_forward(rng.uniform(0, 1, size=20), gate)
            assert np.all(probs > 0) and np.all(probs < 1)

    def test_golden_against_direct_matrix_arithmetic(self):
        rng = np.random.default_rng(11)
        gate = build_gate(rng)
        x = rng.uniform(0, 1, size=20)
        # independent recomputation from the raw parameter arrays
        w1, b1 = gate.layers[0].w.value, gate.layers[0].b.value
        w2, b2 = gate.layers[2].w.value, gate.layers[2].b.value
        w3, b3 = gate.layers[4].w.value, gate.layers[4].b.value
        h1 = np.maximum(x @ w1 + b1, 0)
        h2 = np.maximum(h1 @ w2 + b2, 0)
        z = h2 @ w3 + b3
        expected = 1 / (1 + np.exp(-z))
        assert np.allclose(gate_forward(x, gate), expected, atol=1e-12)


class TestSelectConfig:
    def test_unique_max(self):
        probs = [0.1, 0.2, 0.9, 0.3, 0.1, 0.2]
        assert select_config(probs) is GateConfig.PROTOCOL_FOCUSED

    def test_all_equal_takes_first(self):
        assert select_config([0.5] * 6) is GateConfig.MINIMAL

    def test_symbolic_forces_kmap_config(self):
        probs = [0.99, 0.1, 0.1, 0.1, 0.0, 0.1]
        assert select_config(probs, symbolic=True) is GateConfig.DETERMINISTIC_KMAP


class TestGateTrain:
    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            gate_train([])

    def test_synthetic_clusters_learned(self):
        rng = np.random.default_rng(5)
        data = make_synthetic_gate_dataset(240, rng)
        gate, losses = gate_train(data, lr=0.05, epochs=200, seed=5)
        assert losses[-1] < losses[0]
        hits = 0
        for features, label in data:
            pred = select_config(gate_forward(features, gate))
            if pred is tuple(GateConfig)[int(np.argmax(label))]:
                hits += 1
        assert hits / len(data) >= 0.95

    def test_single_sample_loss_monotone(self):
        rng = np.random.default_rng(9)
        data = make_synthetic_gate_dataset(1, rng)
        _, losses = gate_train(data, lr=1e-3, epochs=10, seed=1)
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_bce_gradients_match_finite_differences(self):
        rng = np.random.default_rng(21)
        gate = build_gate(rng)
        x = rng.uniform(0, 1, size=(3, 20))
        y = (rng.uniform(size=(3, 6)) > 0.5).astype(float)

        def loss_fn():
            return gate_loss(gate, x, y)

        params = gate.params()
        zero_grads(params)
        p = gate.forward(x)
        dout = (p - y) / (p * (1.0 - p)) / y.size
        gate.backward(dout)
        analytic = [prm.grad.copy() for prm in params]
        numeric = fd_gradients(loss_fn, params)
        assert max_rel_error(analytic, numeric) < 1e-4


class TestGateFeatures:
    def test_layout_and_bounds(self):
        spec = Spec(
            name="fsm",
            description="A Moore state machine (FSM) with four states driving a uart status line.",
        )
        v = gate_features(spec, route(spec), fired=("a", "b"), pass_rate=0.7)
        assert v.shape == (20,)
        assert np.all(v >= 0) and np.all(v <= 1)
        assert v[2] == 1.0  # fsm category one-hot
        assert v[9] == 1.0  # fsm keyword flag
        assert v[10] == 1.0  # uart protocol flag
        assert v[18] == 0.5  # two detectors fired out of the 4 cap
        assert v[19] == 0.7

    def test_history_defaults_and_ewma(self):
        from rtlforge.specs import DesignCategory

        h = PassRateHistory()
        assert h.rate(DesignCategory.FSM) == 0.5
        h.update(DesignCategory.FSM, True)
        assert h.rate(DesignCategory.FSM) == pytest.approx(0.55)
        h.update(DesignCategory.FSM, False)
        assert h.rate(DesignCategory.FSM) == pytest.approx(0.495)
