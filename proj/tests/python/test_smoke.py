import struct

import numpy as np
import pytest

import sifrian


def tiny(seed=0):
    p = sifrian.init([3, 4, 2], activation="leaky-relu", slope=0.1, seed=seed, white_layer=True)
    x = np.array([0.3, -0.8, 0.5])
    d = np.array([0.9, 0.1])
    return p, x, d


def cost(p, x, d, s):
    xs = sifrian.forward(p, x)
    reg = sum(lam / 2 * float(v @ v) for lam, v in zip(s.lambdas, xs[:-1]))
    r = d - xs[-1]
    return s.lambda_out / 2 * float(r @ r) + reg


def test_shapes_and_forward():
    p, x, _ = tiny()
    assert p.sizes == [3, 3, 4, 2]
    assert p.white_layers == 1
    assert [w.shape for w in p.weights] == [(3, 3), (4, 3), (2, 4)]
    np.testing.assert_array_equal(p.weights[0], np.eye(3))
    np.testing.assert_allclose(sifrian.predict(p, x), sifrian.forward(p, x)[-1])


def test_gradient_matches_central_differences():
    p, x, d = tiny(1)
    s = sifrian.Schedule([0.5, 0.7], lambda_out=1.0)
    g = sifrian.gradient(p, x, d, s).flatten()
    fd = np.zeros_like(g)
    h = 1e-6
    for i in range(g.size):
        e = np.zeros_like(g)
        e[i] = h
        q_plus, q_minus = p.copy(), p.copy()
        for q, sign in ((q_plus, 1), (q_minus, -1)):
            shift = sifrian.Direction.unflatten(p, sign * e)
            q.weights = [w + dw for w, dw in zip(q.weights, shift.weights)]
            q.biases = [b + db for b, db in zip(q.biases, shift.biases)]
        fd[i] = (cost(q_plus, x, d, s) - cost(q_minus, x, d, s)) / (2 * h)
    np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-8)


def test_hessian_is_symmetric_and_newton_solves_it():
    p, x, d = tiny(2)
    s = sifrian.Schedule.uniform(3, 0.8)
    h = sifrian.dense_hessian(p, x, d, s)
    np.testing.assert_allclose(h, h.T, atol=1e-12)
    rng = np.random.default_rng(0)
    u = sifrian.Direction.unflatten(p, rng.standard_normal(p.parameter_count))
    np.testing.assert_allclose(sifrian.hvp(p, x, d, s, u).flatten(), h @ u.flatten(), atol=1e-12)
    n = sifrian.newton_exact(p, x, d, s).flatten()
    g = sifrian.gradient(p, x, d, s).flatten()
    assert np.abs(h @ n - g).max() <= 1e-8 * np.abs(g).max()


def test_mk_is_a_descent_direction():
    p, x, d = tiny(3)
    s = sifrian.spectral_schedule(p, x, d)
    mk = sifrian.mk_direction(p, x, d, s)
    assert mk.dot(sifrian.gradient(p, x, d, s)) > 0
    report = sifrian.closed_form_spectrum(p, x, d, s)
    assert report["radius"] > 0
    assert all(ev < 0 for _, ev, _ in report["family_b"])


def test_train_step_updates_in_place():
    p, x, d = tiny(4)
    before = p.copy()
    report = sifrian.train_step(p, x, d, kind="sgd", lr=0.05)
    assert report["kind"] == "sgd"
    assert report["cost_after"] < report["cost_before"]
    assert not (p == before)


def test_idx_parsing_and_errors():
    img = struct.pack(">iiii", 0x803, 2, 2, 3) + bytes(range(12))
    arr = sifrian.parse_idx_images(img)
    assert arr.shape == (2, 2, 3)
    assert arr[1, 1, 2] == 11
    labels = sifrian.parse_idx_labels(struct.pack(">ii", 0x801, 3) + bytes([4, 0, 9]))
    assert list(labels) == [4, 0, 9]
    with pytest.raises(sifrian.Error):
        sifrian.parse_idx_labels(struct.pack(">ii", 0x801, 1) + bytes([10]))
    with pytest.raises(sifrian.Error):
        sifrian.parse_idx_images(img[:-1])


def test_params_round_trip(tmp_path):
    p, _, _ = tiny(5)
    path = tmp_path / "p.bin"
    sifrian.save_params(p, path)
    assert sifrian.load_params(path) == p


def test_verify_suite_passes():
    checks = sifrian.verify(seed=0, samples=4)
    assert all(c["passed"] for c in checks if c["gating"])
