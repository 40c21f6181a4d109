import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uavlos.coverage import User
from uavlos.scenario import (
    Region,
    Scenario,
    ScenarioError,
    ScenarioWarning,
    generate_grid,
    generate_users,
    grid_centers,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

DEFAULT_REGION = Region()


class TestGrid:
    def test_small_region(self):
        grid = generate_grid(Region(40, 40, 20, grid_size=20, boundary_margin=0))
        assert [g.center for g in grid] == [
            (10.0, 10.0, 10.0),
            (30.0, 10.0, 10.0),
            (10.0, 30.0, 10.0),
            (30.0, 30.0, 10.0),
        ]
        assert [g.index for g in grid] == [0, 1, 2, 3]

    def test_default_region_counts(self):
        # 1100 m horizontally -> 55 cells; 150 m vertically rounds up to 8 layers
        assert DEFAULT_REGION.axis_cells() == (55, 55, 8)
        centers = grid_centers(DEFAULT_REGION)
        assert len(centers) == 55 * 55 * 8
        assert centers[:, 0].min() == -40.0 and centers[:, 0].max() == 1040.0
        assert centers[:, 2].min() == 10.0 and centers[:, 2].max() == 150.0

    def test_unique_and_ordered(self):
        centers = grid_centers(Region(60, 40, 40, grid_size=20, boundary_margin=20))
        assert len({tuple(c) for c in centers}) == len(centers)
        keys = [(c[2], c[1], c[0]) for c in centers]
        assert keys == sorted(keys)

    @given(
        st.integers(1, 6), st.integers(1, 6), st.integers(1, 6),
        st.sampled_from([10.0, 20.0]), st.floats(0.0, 60.0),
    )
    def test_count_is_product(self, nx, ny, nz, g, margin):
        region = Region(nx * g, ny * g, nz * g, grid_size=g, boundary_margin=margin)
        cx, cy, cz = region.axis_cells()
        assert len(generate_grid(region)) == cx * cy * cz
        assert cx == math.ceil((nx * g + 2 * margin) / g - 1e-9)

    def test_grid_must_divide(self):
        with pytest.raises(ValueError):
            Region(1000, 1000, 90, grid_size=20)


class TestUsers:
    def test_partition_and_total(self):
        users = generate_users(DEFAULT_REGION, 100, (10, 15), (15, 45), seed=3)
        assert len(users) == 100
        assert [u.id for u in users] == list(range(100))

    @pytest.mark.parametrize("seed", range(20))
    def test_cluster_count(self, seed):
        from uavlos.scenario import partition_sizes

        sizes = partition_sizes(np.random.Generator(np.random.PCG64(seed)), 100, (10, 15))
        assert sum(sizes) == 100
        # ceil(100/15) = 7 up to floor(100/10) = 10 clusters
        assert 7 <= len(sizes) <= 10
        assert all(10 <= s <= 15 for s in sizes[:-1])

    def test_deterministic(self):
        a = generate_users(DEFAULT_REGION, 50, aov_interval=(30, 90), seed=9)
        b = generate_users(DEFAULT_REGION, 50, aov_interval=(30, 90), seed=9)
        assert a == b
        sa = Scenario(DEFAULT_REGION, a, seed=9, aov_interval=(30, 90))
        sb = Scenario(DEFAULT_REGION, b, seed=9, aov_interval=(30, 90))
        assert json.dumps(scenario_to_dict(sa)) == json.dumps(scenario_to_dict(sb))

    def test_full_view_interval(self):
        users = generate_users(DEFAULT_REGION, 30, aov_interval=(180, 180), seed=1)
        assert all(u.aov == 180.0 for u in users)

    def test_interval_does_not_move_users(self):
        a = generate_users(DEFAULT_REGION, 40, aov_interval=(15, 45), seed=2)
        b = generate_users(DEFAULT_REGION, 40, aov_interval=(120, 180), seed=2)
        assert [u.position for u in a] == [u.position for u in b]
        assert [u.lov_axis for u in a] == [u.lov_axis for u in b]

    def test_hemisphere_up(self):
        users = generate_users(DEFAULT_REGION, 60, seed=4, lov_mode="hemisphere-up")
        assert all(u.lov_axis[2] >= 0 for u in users)

    def test_radius_too_large(self):
        with pytest.raises(ValueError):
            generate_users(DEFAULT_REGION, 10, cluster_radius=51.0)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(1, 120),
        st.tuples(st.floats(1.0, 180.0), st.floats(0.0, 180.0)),
        st.integers(0, 2**32 - 1),
        st.floats(0.0, 50.0),
    )
    def test_invariants(self, n, iv, seed, radius):
        lo = iv[0]
        hi = min(180.0, lo + iv[1])
        users = generate_users(DEFAULT_REGION, n, (10, 15), (lo, hi), seed, radius)
        assert len(users) == n
        for u in users:
            assert DEFAULT_REGION.contains(u.position)
            assert lo <= u.aov <= hi
            assert np.linalg.norm(u.lov_axis) == pytest.approx(1.0, abs=1e-9)
        Scenario(DEFAULT_REGION, users, aov_interval=(lo, hi))


class TestPersistence:
    def scenario(self):
        users = generate_users(DEFAULT_REGION, 25, aov_interval=(30, 90), seed=5)
        return Scenario(DEFAULT_REGION, users, seed=5, aov_interval=(30, 90))

    def test_round_trip(self, tmp_path):
        s = self.scenario()
        path = tmp_path / "s.json"
        save_scenario(s, path)
        assert load_scenario(path) == s

    def test_schema_keys(self):
        d = scenario_to_dict(self.scenario())
        assert set(d) == {"region", "radio", "users", "seed", "aov_interval_deg"}
        assert set(d["users"][0]) == {"id", "pos", "lov_axis", "aov_deg"}
        assert d["radio"]["fc_hz"] == 60e9

    def test_missing_aov(self):
        d = scenario_to_dict(self.scenario())
        del d["users"][3]["aov_deg"]
        with pytest.raises(ScenarioError, match=r"users\[3\]\.aov_deg"):
            scenario_from_dict(d)

    def test_bad_type_names_path(self):
        d = scenario_to_dict(self.scenario())
        d["users"][1]["pos"] = [1, "x", 2]
        with pytest.raises(ScenarioError, match=r"users\[1\]\.pos\[1\]"):
            scenario_from_dict(d)

    def test_unknown_field_warns(self):
        d = scenario_to_dict(self.scenario())
        d["weather"] = "rain"
        d["users"][0]["colour"] = "red"
        with pytest.warns(ScenarioWarning) as record:
            s = scenario_from_dict(d)
        assert len(record) == 2
        assert s == self.scenario()

    def test_defaults(self):
        s = scenario_from_dict({"users": [{"id": 0, "pos": [1, 2, 3], "lov_axis": [0, 0, 1], "aov_deg": 40}]})
        assert s.region == Region()
        assert s.params.hpbw == 45.0 and s.params.snr_threshold == 15.0
        assert s.aov_interval == (40.0, 40.0)

    def test_user_outside_region(self):
        d = {"users": [{"id": 0, "pos": [1, 2, 300], "lov_axis": [0, 0, 1], "aov_deg": 40}]}
        with pytest.raises(ScenarioError, match=r"users\[0\]\.pos"):
            scenario_from_dict(d)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError):
            load_scenario(path)

    def test_duplicate_ids(self):
        u = User(0, (1, 1, 1), (0, 0, 1), 30.0)
        with pytest.raises(ScenarioError, match="duplicate"):
            Scenario(DEFAULT_REGION, (u, u), aov_interval=(30, 30))
