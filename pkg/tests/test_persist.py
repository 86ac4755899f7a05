import numpy as np
import pytest

from kernel_jl import baselines, sketch
from kernel_jl.errors import IoError, ParseError
from kernel_jl.kernel import KernelSpec
from kernel_jl.persist import FORMAT_VERSION, load_projector, save_projector

SPEC = KernelSpec(0.7)


@pytest.fixture
def pts(rng):
    return rng.standard_normal((20, 3))


@pytest.mark.parametrize("make,tb", [
    (lambda x: sketch.fit(x, SPEC, 4, seed=8), sketch.transform_batch),
    (lambda x: sketch.fit(x, SPEC, 4, seed=8, centered=False), sketch.transform_batch),
    (lambda x: sketch.fit(x, SPEC, 4, seed=8, center_oos=False), sketch.transform_batch),
    (lambda x: baselines.kpca_fit(x, SPEC, 3), baselines.kpca_transform_batch),
    (lambda x: baselines.kpca_fit(x, SPEC, 3, "unit_norm"), baselines.kpca_transform_batch),
    (lambda x: baselines.nystrom_fit(x, SPEC, 3), baselines.nystrom_transform_batch),
])
def test_round_trip_bit_exact(tmp_path, rng, pts, make, tb):
    proj = make(pts)
    path = tmp_path / "p.npz"
    save_projector(proj, path)
    back = load_projector(path)
    assert type(back) is type(proj)
    assert back.spec == proj.spec
    np.testing.assert_array_equal(back.subsample, proj.subsample)
    if isinstance(proj, sketch.SketchProjector):
        np.testing.assert_array_equal(back.sketch, proj.sketch)
        assert (back.seed, back.centered, back.center_oos) == (proj.seed, proj.centered, proj.center_oos)
    xs = rng.standard_normal((30, 3))
    np.testing.assert_array_equal(tb(back, xs).points, tb(proj, xs).points)


def test_bad_files(tmp_path, pts):
    with pytest.raises(IoError):
        load_projector(tmp_path / "none.npz")
    junk = tmp_path / "junk.npz"
    junk.write_bytes(b"not a zip")
    with pytest.raises(IoError):
        load_projector(junk)
    old = tmp_path / "old.npz"
    np.savez(old, version=FORMAT_VERSION + 1, method="kjl")
    with pytest.raises(ParseError):
        load_projector(old)
    other = tmp_path / "other.npz"
    np.savez(other, version=FORMAT_VERSION, method="svd", bandwidth_sq=1.0, subsample=pts)
    with pytest.raises(ParseError):
        load_projector(other)
    with pytest.raises(TypeError):
        save_projector(object(), tmp_path / "x.npz")
