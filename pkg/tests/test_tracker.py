import numpy as np
import pytest
from sklearn.base import clone

from deformdcf import features as ft
from deformdcf import tracker as tk
from deformdcf.deformation import reg_energy
from deformdcf.errors import SequenceError
from deformdcf.evaluation import iou
from deformdcf.filters import full_score_raw, subfilter_score_raw
from deformdcf.spectral import Spectrum, evaluate
from deformdcf.synthetic import make_sequence


def textured_frame(rng, shape=(90, 110), top=(30, 40), size=(28, 30)):
    frame = rng.integers(90, 130, size=(*shape, 3)).astype(np.uint8)
    block = rng.integers(0, 256, size=(size[0] // 4, size[1] // 2, 3))
    tex = np.repeat(np.repeat(block, 4, axis=0), 2, axis=1)[:size[0], :size[1]]
    frame[top[0]:top[0] + size[0], top[1]:top[1] + size[1]] = tex
    return frame


def bbox_of(top, size):
    return (top[1], top[0], size[1], size[0])  # (x, y, w, h)


@pytest.fixture
def small_params():
    return tk.TrackerParams(parts=4, deformation="affine", max_cells=24)


class TestInit:
    def test_part_count_small_target(self, rng):
        frame = textured_frame(rng, shape=(160, 160), top=(50, 50), size=(60, 60))
        state = tk.init_state(tk.FrameData(frame), (50, 50, 60, 60),
                              tk.TrackerParams())
        assert state.geometry.nsub == 5  # root + 2x2 below the area threshold

    def test_part_count_large_target(self, rng):
        frame = textured_frame(rng, shape=(240, 260), top=(60, 60),
                               size=(100, 120))
        state = tk.init_state(tk.FrameData(frame), (60, 60, 120, 100),
                              tk.TrackerParams(max_cells=30))
        assert state.geometry.nsub == 10  # root + 3x3 at or above 80x80 px^2

    def test_root_anchor_is_origin(self, rng):
        frame = textured_frame(rng)
        state = tk.init_state(tk.FrameData(frame), bbox_of((30, 40), (28, 30)),
                              tk.TrackerParams(parts=4))
        assert np.array_equal(state.deform.anchors[0], [0.0, 0.0])
        assert np.array_equal(state.deform.positions[0], [0.0, 0.0])

    def test_bbox_must_be_inside_frame(self, rng):
        frame = textured_frame(rng)
        with pytest.raises(ValueError):
            tk.init_state(tk.FrameData(frame), (100, 80, 30, 30),
                          tk.TrackerParams())
        with pytest.raises(ValueError):
            tk.init_state(tk.FrameData(frame), (10, 10, 0, 5),
                          tk.TrackerParams())


class TestDetect:
    def test_self_detection_on_training_frame(self, rng, small_params):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        state = tk.init_state(tk.FrameData(frame), bbox, small_params)
        center, scale, score = tk.detect(state, tk.FrameData(frame))
        assert np.hypot(center[0] - state.center[0],
                        center[1] - state.center[1]) < 0.5
        assert score > 0

    def test_planted_translation(self, rng):
        top, size = (30, 40), (28, 30)
        frame = textured_frame(rng, top=top, size=size)
        params = tk.TrackerParams(parts=0, scale_count=1, max_cells=24)
        state = tk.init_state(tk.FrameData(frame), bbox_of(top, size), params)
        shifted = np.roll(frame, shift=(3, -5), axis=(0, 1))
        center, scale, _ = tk.detect(state, tk.FrameData(shifted))
        dy = center[0] - state.center[0]
        dx = center[1] - state.center[1]
        assert abs(dy - 3.0) < 0.5
        assert abs(dx - (-5.0)) < 0.5
        assert scale == state.scale  # single-scale pyramid keeps the input

    def test_reported_score_matches_evaluated_peak(self, rng, small_params):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        state = tk.init_state(tk.FrameData(frame), bbox, small_params)
        data = tk.FrameData(np.roll(frame, shift=(1, 2), axis=(0, 1)))
        center, scale, score = tk.detect(state, data)
        geo = state.geometry
        spectra = geo.spectra(geo.extract(data, state.center, scale))
        raw = full_score_raw(state.coeffs, spectra,
                             tk._predicted_positions(state))
        dt = np.array([(center[0] - state.center[0]) / (geo.unit_px[0] * scale),
                       (center[1] - state.center[1]) / (geo.unit_px[1] * scale)])
        val = evaluate(Spectrum(geo.score_layout, raw), dt)
        assert abs(val - score) < 1e-6


class TestUpdate:
    def test_static_frames_keep_positions(self, rng, small_params):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        state = tk.init_state(tk.FrameData(frame), bbox, small_params)
        data = tk.FrameData(frame)
        center, scale, _ = tk.detect(state, data)
        new = tk.update(state, data, center, scale)
        drift = np.max(np.abs(new.deform.positions - state.deform.positions))
        assert drift < 1e-3

    def test_huge_prior_pins_positions(self, rng):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        params = tk.TrackerParams(parts=4, deformation="identity",
                                  position_weight=1e9, max_cells=24)
        state = tk.init_state(tk.FrameData(frame), bbox, params)
        data = tk.FrameData(np.roll(frame, shift=(2, 1), axis=(0, 1)))
        for _ in range(3):
            center, scale, _ = tk.detect(state, data)
            state = tk.update(state, data, center, scale)
            gap = np.max(np.abs(state.deform.positions - state.deform.anchors))
            assert gap < 1e-3

    def test_memory_growth_saturates(self, rng):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        params = tk.TrackerParams(parts=0, memory_size=3, max_cells=20)
        state = tk.init_state(tk.FrameData(frame), bbox, params)
        sizes = []
        for _ in range(5):
            data = tk.FrameData(frame)
            center, scale, _ = tk.detect(state, data)
            state = tk.update(state, data, center, scale)
            sizes.append(len(state.memory))
        assert sizes == [2, 3, 3, 3, 3]


class TestTrackSequence:
    def test_single_frame_returns_init_bbox(self, rng):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        results = tk.track_sequence([frame], bbox,
                                    tk.TrackerParams(parts=0, max_cells=20))
        assert len(results) == 1
        b = results[0].box
        assert np.allclose([b.x, b.y, b.w, b.h], bbox, atol=1e-9)

    def test_static_scene_stays_put(self, rng):
        frame = textured_frame(rng)
        bbox = bbox_of((30, 40), (28, 30))
        init = tk.TrackerParams(parts=4, max_cells=24)
        results = tk.track_sequence([frame] * 10, bbox, init)
        from deformdcf.evaluation import Box
        ref = Box(*bbox)
        assert all(iou(r.box, ref) > 0.95 for r in results)

    def test_translating_square_tracks(self):
        frames, boxes = make_sequence("translate", 15, seed=3)
        init = (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h)
        results = tk.track_sequence(frames, init,
                                    tk.TrackerParams(parts=0))
        vals = [iou(r.box, b) for r, b in zip(results, boxes)]
        assert float(np.mean(vals)) > 0.7

    def test_determinism_bitwise(self, rng):
        frames, boxes = make_sequence("translate", 6, seed=4)
        init = (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h)
        params = tk.TrackerParams(parts=4, deformation="affine")
        a = tk.track_sequence(frames, init, params)
        b = tk.track_sequence(frames, init, params)
        for ra, rb in zip(a, b):
            assert ra.box == rb.box
            assert ra.score == rb.score
            assert np.array_equal(ra.positions, rb.positions)
            assert np.array_equal(ra.transform, rb.transform)

    def test_rigid_reduction_invariants(self, rng):
        frames, boxes = make_sequence("translate", 5, seed=4)
        init = (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h)
        params = tk.TrackerParams(parts=0)
        state = tk.init_state(tk.FrameData(frames[0]),
                              init, params)
        for i in range(1, 5):
            data = tk.FrameData(frames[i])
            center, scale, _ = tk.detect(state, data)
            state = tk.update(state, data, center, scale)
            assert reg_energy(state.deform) == 0.0
            sample = state.memory.samples[-1]
            total = full_score_raw(state.coeffs, sample.spectra,
                                   sample.positions)
            single = subfilter_score_raw(state.coeffs.layout,
                                         state.coeffs.coeffs[0],
                                         sample.spectra)
            assert np.array_equal(total, single)

    def test_unreadable_frame_raises_sequence_error(self, rng, tmp_path):
        frame = textured_frame(rng)
        from PIL import Image
        good = tmp_path / "0001.png"
        Image.fromarray(frame).save(good)
        bad = tmp_path / "0002.png"
        bad.write_bytes(b"not an image")
        with pytest.raises(SequenceError, match="frame 2"):
            tk.track_sequence([str(good), str(bad)],
                              bbox_of((30, 40), (28, 30)),
                              tk.TrackerParams(parts=0, max_cells=20))


class TestPrecomputedFeatures:
    def test_tracking_from_feature_file(self, rng, tmp_path):
        frames, boxes = make_sequence("translate", 8, seed=5)
        # precompute dense grayscale cell grids over the full frames
        h, w = frames[0].shape[:2]
        stack = np.stack([
            ft.grayscale_cells(ft.to_grayscale(f)[:h // 2 * 2, :w // 2 * 2], 2)
            for f in frames
        ])
        path = str(tmp_path / "feat.dff")
        ft.save_feature_file(path, stack)
        init = (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h)
        params = tk.TrackerParams(parts=0, features="precomputed",
                                  precomputed_path=path, precomputed_scale=1.0)
        results = tk.track_sequence(frames, init, params, precomputed=path)
        vals = [iou(r.box, b) for r, b in zip(results, boxes)]
        assert float(np.mean(vals)) > 0.5

    def test_mixed_resolution_blocks(self, rng, tmp_path):
        frames, boxes = make_sequence("translate", 5, seed=6)
        h, w = frames[0].shape[:2]
        stack = np.stack([
            ft.grayscale_cells(ft.to_grayscale(f)[:h // 2 * 2, :w // 2 * 2], 2)
            for f in frames
        ])
        path = str(tmp_path / "feat.dff")
        ft.save_feature_file(path, stack)
        init = (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h)
        params = tk.TrackerParams(parts=0,
                                  features="grayscale+precomputed",
                                  precomputed_path=path,
                                  precomputed_scale=0.5)
        results = tk.track_sequence(frames, init, params, precomputed=path)
        assert len(results) == 5
        vals = [iou(r.box, b) for r, b in zip(results, boxes)]
        assert float(np.mean(vals)) > 0.5


class TestEstimator:
    def test_get_set_params_roundtrip(self):
        est = tk.DeformableCorrelationTracker(position_weight=1e-3, parts=4)
        params = est.get_params()
        assert params["position_weight"] == 1e-3
        est.set_params(scale_count=3)
        assert est.scale_count == 3

    def test_clone_keeps_params(self):
        est = tk.DeformableCorrelationTracker(parts=9, learning_rate=0.05)
        copy = clone(est)
        assert copy.parts == 9
        assert copy.learning_rate == 0.05

    def test_fit_predict_step(self, rng):
        frames, boxes = make_sequence("translate", 5, seed=7)
        est = tk.DeformableCorrelationTracker(parts=0, max_cells=24)
        est.fit(frames[0], (boxes[0].x, boxes[0].y, boxes[0].w, boxes[0].h))
        peek = est.predict(frames[1])
        assert iou(peek, boxes[1]) > 0.5
        results = est.track(frames[1:])
        assert len(results) == 4
        assert iou(results[-1].box, boxes[4]) > 0.5

    def test_predict_without_fit_raises(self, rng):
        est = tk.DeformableCorrelationTracker()
        with pytest.raises(RuntimeError):
            est.predict(np.zeros((10, 10), dtype=np.uint8))

    def test_defaults_match_tracker_params(self):
        est = tk.DeformableCorrelationTracker()
        assert tk.TrackerParams(**est.get_params()) == tk.TrackerParams()
