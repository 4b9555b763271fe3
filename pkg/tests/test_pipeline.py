import json

import numpy as np
import pytest

from triskel import (
    BinaryRaster,
    DataError,
    MaskFeaturizer,
    PipelineConfig,
    StageError,
    UnusableSample,
    run_pipeline,
    run_pipeline_mask,
    write_pgm,
)

import shapes


class TestPipelineConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.dce_target_vertices == 12
        assert cfg.prune_radius == 5.0
        assert cfg.threshold == 127

    def test_validation(self):
        with pytest.raises(DataError):
            PipelineConfig(dce_target_vertices=2)
        with pytest.raises(DataError):
            PipelineConfig(prune_radius=0.0)
        with pytest.raises(DataError):
            PipelineConfig(threshold=400)

    def test_file_round_trip(self, tmp_path):
        cfg = PipelineConfig(dce_target_vertices=9, prune_radius=7.5, seed=11)
        path = tmp_path / "pipeline.cfg"
        cfg.to_file(path)
        assert PipelineConfig.from_file(path) == cfg

    def test_file_comments_and_unknown_keys(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("# comment\ndce_target_vertices = 8  # inline\n")
        assert PipelineConfig.from_file(path).dce_target_vertices == 8
        path.write_text("bogus_key = 3\n")
        with pytest.raises(DataError):
            PipelineConfig.from_file(path)

    def test_fingerprint_covers_all_fields(self):
        fp = PipelineConfig().fingerprint()
        assert set(fp) == {
            "dce_target_vertices",
            "dce_min_relevance",
            "prune_radius",
            "threshold",
            "eps_area",
            "eps_incircle",
            "eps_dup",
            "normalize_by_refs",
            "seed",
        }


class TestRunPipelineMask:
    def test_plus_mask_counts(self):
        # A thick plus: 4 endpoints + 1 junction = 5 points, hull of 4.
        art = run_pipeline_mask(BinaryRaster(shapes.thick_plus(arm=14, thickness=5)))
        assert len(art.points.endpoints) == 4
        assert len(art.points.junctions) == 1
        z = len(art.triangulation.points)
        k = len(art.triangulation.hull)
        assert z == 5 and k == 4
        assert len(art.triangulation.triangles) == 2 * z - 2 - k == 4
        assert art.features.m == 4

    def test_thin_line_unusable(self):
        art = shapes.hbar(h=3, w=20)
        with pytest.raises(UnusableSample):
            run_pipeline_mask(BinaryRaster(art))

    def test_empty_mask_stage_error(self):
        with pytest.raises(StageError) as err:
            run_pipeline_mask(BinaryRaster(shapes.blank(10, 10)), source="foo.pgm")
        assert err.value.stage == "largest_component"
        assert "foo.pgm" in str(err.value)

    def test_star_mask_rich_features(self):
        rng = np.random.default_rng(5)
        from triskel.synth import make_shape

        art = run_pipeline_mask(make_shape("star5", rng))
        assert art.features.m >= 4
        assert len(art.points.endpoints) == 5


class TestRunPipelineFile:
    def test_file_pipeline_with_dumps(self, tmp_path):
        mask = BinaryRaster(shapes.thick_plus(arm=14, thickness=5))
        mask_path = tmp_path / "plus.pgm"
        write_pgm(mask, mask_path)
        dump = tmp_path / "dump"
        fm = run_pipeline(mask_path, dump_dir=dump)
        assert fm.m == 4
        assert (dump / "plus.skeleton.pgm").exists()
        assert (dump / "plus.pruned.pgm").exists()
        tri_data = json.loads((dump / "plus.triangulation.json").read_text())
        assert set(tri_data) == {"points", "triangles", "hull"}
        meta = json.loads((dump / "plus.points.json").read_text())
        assert len(meta["endpoints"]) == 4

    def test_missing_file_is_stage_error(self, tmp_path):
        with pytest.raises(StageError) as err:
            run_pipeline(tmp_path / "nope.pgm")
        assert err.value.stage == "read_mask"

    def test_resume_from_dumped_artifacts(self, tmp_path):
        """Reloading the dumped triangulation reproduces the same features."""
        from triskel import Triangulation, sample_features

        mask = BinaryRaster(shapes.thick_plus(arm=14, thickness=5))
        mask_path = tmp_path / "plus.pgm"
        write_pgm(mask, mask_path)
        dump = tmp_path / "dump"
        fm = run_pipeline(mask_path, dump_dir=dump)
        tri = Triangulation.from_json_dict(
            json.loads((dump / "plus.triangulation.json").read_text())
        )
        assert sample_features(tri) == fm

    def test_resume_from_dumped_skeleton(self, tmp_path):
        """Reloading the pruned-skeleton PGM and rerunning the tail stages
        reproduces the same features."""
        from triskel import delaunay, detect_points, read_mask, sample_features

        mask = BinaryRaster(shapes.thick_plus(arm=14, thickness=5))
        mask_path = tmp_path / "plus.pgm"
        write_pgm(mask, mask_path)
        dump = tmp_path / "dump"
        fm = run_pipeline(mask_path, dump_dir=dump)
        pruned = read_mask(dump / "plus.pruned.pgm")
        points = detect_points(pruned)
        tri = delaunay(points.all_points())
        assert sample_features(tri) == fm


class TestMaskFeaturizer:
    def test_transform_mixed_inputs(self, tmp_path):
        mask = BinaryRaster(shapes.thick_plus(arm=14, thickness=5))
        path = tmp_path / "m.pgm"
        write_pgm(mask, path)
        feats = MaskFeaturizer().fit().transform([mask, mask.pixels, path])
        assert len(feats) == 3
        assert feats[0] == feats[1] == feats[2]

    def test_unusable_raises_or_skips(self):
        bad = BinaryRaster(shapes.hbar(h=3, w=20))
        with pytest.raises(UnusableSample):
            MaskFeaturizer().transform([bad])
        out = MaskFeaturizer(skip_unusable=True).transform([bad])
        assert out == [None]

    def test_get_params_round_trip(self):
        from sklearn.base import clone

        f = MaskFeaturizer(dce_target_vertices=8, prune_radius=3.0)
        params = f.get_params()
        assert params["dce_target_vertices"] == 8
        g = clone(f)
        assert g.get_params() == params

    def test_bad_params_rejected_at_fit(self):
        with pytest.raises(DataError):
            MaskFeaturizer(dce_target_vertices=1).fit()

    def test_composes_with_voting_classifier(self):
        from triskel import IntervalVotingClassifier
        from triskel.synth import make_shape

        rng = np.random.default_rng(17)
        X, y = [], []
        for family in ("cross", "star5"):
            for _ in range(5):
                X.append(make_shape(family, rng))
                y.append(family)
        feats = MaskFeaturizer().fit().transform(X)
        clf = IntervalVotingClassifier().fit(feats, y)
        assert clf.score(feats, y) >= 0.9
