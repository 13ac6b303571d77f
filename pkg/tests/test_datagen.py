import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from datagen.dataset import Dataset, FlowRecord, load_dataset, save_dataset
from datagen.flows import (
    diffusion_flow,
    gradient_flow_family,
    localization_dataset,
    noisy_flow_family,
    random_cyclic_flow,
    top_degree_sources,
)
from datagen.masks import MaskSet, mask_flow, restrict, sample_artificial
from datagen.partition import PartitionedGraph, planted_partition
from graphs.graph import build_graph
from graphs.hodge import hodge_decompose
from graphs.operators import incidence_matrix
from utils.errors import (
    DimensionMismatchError,
    DisconnectedAfterRetriesError,
    DisconnectedGraphError,
    NodeIdOutOfRangeError,
)
from utils.rng import STREAM_SAMPLES, make_rng


@pytest.fixture(scope="module")
def small_partition():
    return planted_partition(3, 6, 0.8, 0.2, seed=0)


def test_planted_partition_disjoint_communities_fail_fast():
    with pytest.raises(DisconnectedAfterRetriesError):
        planted_partition(2, 3, 1.0, 0.0, seed=0)


def test_planted_partition_complete_graph():
    pg = planted_partition(2, 3, 1.0, 1.0, seed=0)
    assert pg.graph.num_nodes == 6
    assert pg.graph.num_edges == 15
    assert_array_equal(pg.community_of, [0, 0, 0, 1, 1, 1])
    assert pg.num_communities == 2
    assert_array_equal(pg.members(1), [3, 4, 5])


def test_planted_partition_is_deterministic_and_connected():
    a = planted_partition(3, 10, 0.5, 0.1, seed=7)
    b = planted_partition(3, 10, 0.5, 0.1, seed=7)
    assert a.graph == b.graph
    assert a.graph.is_connected()


def test_planted_partition_edge_density():
    intra = []
    for seed in range(20):
        pg = planted_partition(5, 20, 0.8, 0.2, seed=seed)
        labels = pg.community_of
        intra.append(sum(labels[u] == labels[v] for u, v in pg.graph.edges))
    sigma = np.sqrt(950 * 0.8 * 0.2)
    assert abs(np.mean(intra) - 760.0) < 4 * sigma / np.sqrt(20)


def test_planted_partition_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        planted_partition(2, 3, 0.2, 0.5)


def test_diffusion_flow_at_time_zero_is_incidence_column(triangle):
    pg = PartitionedGraph(triangle, np.array([0, 0, 1]))
    f, label = diffusion_flow(pg, 1, 0, noise_std=0.0)
    assert_array_equal(f, [1.0, -1.0, 0.0])
    assert label == 0


def test_noiseless_diffusion_is_pure_gradient(small_partition):
    for t in (1, 5, 20):
        f, _ = diffusion_flow(small_partition, 2, t, noise_std=0.0)
        cyclic, _ = hodge_decompose(f, small_partition.graph)
        assert np.max(np.abs(cyclic)) < 1e-9
        assert cyclic @ cyclic <= 1e-18 * max(f @ f, 1e-300)


def test_diffusion_from_isolated_node_is_noise_only():
    pg = PartitionedGraph(build_graph([(0, 1)], 3), np.array([0, 0, 1]))
    clean, _ = diffusion_flow(pg, 2, 3, noise_std=0.0)
    assert_array_equal(clean, [0.0])
    noisy, _ = diffusion_flow(pg, 2, 3, noise_std=0.5, seed=1)
    assert noisy[0] != 0.0


def test_diffusion_flow_checks_source(small_partition):
    with pytest.raises(NodeIdOutOfRangeError):
        diffusion_flow(small_partition, 18, 1)


def test_top_degree_sources(small_partition):
    degrees = small_partition.graph.degrees()
    for community, sources in enumerate(top_degree_sources(small_partition)):
        members = small_partition.members(community)
        assert len(sources) == 1
        assert degrees[sources[0]] == degrees[members].max()


def test_localization_dataset_basics(small_partition):
    assert len(localization_dataset(small_partition, 0, seed=0)) == 0

    ds = localization_dataset(small_partition, 30, (2, 4), seed=5)
    sources = [s for group in top_degree_sources(small_partition) for s in group]
    assert ds.num_classes == 3
    for record in ds.records:
        assert 2 <= record.time <= 4
        assert record.source in sources
        assert record.label == small_partition.community_of[record.source]

    again = localization_dataset(small_partition, 30, (2, 4), seed=5)
    assert_array_equal(again.flows(), ds.flows())
    assert_array_equal(again.labels(), ds.labels())


def test_localization_labels_are_balanced():
    pg = planted_partition(5, 4, 0.9, 0.3, seed=1)
    ds = localization_dataset(pg, 2000, (1, 3), seed=0)
    counts = np.bincount(ds.labels(), minlength=5)
    sigma = np.sqrt(2000 * 0.2 * 0.8)
    assert np.all(np.abs(counts - 400) < 4 * sigma)


def test_noisy_family_without_noise_repeats_base(random_graph):
    g = random_graph(12, 8, 0)
    base = random_cyclic_flow(g, seed=0)
    ds = noisy_flow_family(base, g, 4, cyclic_std=0.0, gradient_std=0.0, seed=1)
    for record in ds.records:
        assert_array_equal(record.flow, base)


def test_noisy_family_noise_components(random_graph):
    g = random_graph(12, 8, 1)
    b = incidence_matrix(g)
    base = random_cyclic_flow(g, seed=1)

    cyclic_only = noisy_flow_family(base, g, 5, cyclic_std=0.3, gradient_std=0.0, seed=2)
    for record in cyclic_only.records:
        assert np.max(np.abs(b @ (record.flow - base))) < 1e-9

    gradient_only = noisy_flow_family(base, g, 5, cyclic_std=0.0, gradient_std=0.3, seed=2)
    for record in gradient_only.records:
        cyclic, _ = hodge_decompose(record.flow - base, g)
        assert np.max(np.abs(cyclic)) < 1e-9


def test_gradient_family(random_graph):
    g = random_graph(10, 6, 3)
    ds = gradient_flow_family(g, 3, seed=4)
    flows = ds.flows()
    assert len({tuple(f) for f in flows}) == 3
    for f in flows:
        cyclic, _ = hodge_decompose(f, g)
        assert np.max(np.abs(cyclic)) < 1e-9
    assert_array_equal(gradient_flow_family(g, 3, seed=4).flows(), flows)


def test_gradient_family_smoothing_contracts(random_graph):
    g = random_graph(10, 6, 3)
    smooth = gradient_flow_family(g, 1, smooth_order=50, seed=0).flows()[0]
    eta = make_rng(0, STREAM_SAMPLES, 0).normal(0.0, 1.0, g.num_nodes)
    assert np.linalg.norm(smooth) < np.linalg.norm(incidence_matrix(g).T @ eta)


def test_gradient_family_needs_connected_graph():
    with pytest.raises(DisconnectedGraphError):
        gradient_flow_family(build_graph([(0, 1), (2, 3)], 4), 1)


def test_random_cyclic_flow_vanishes_on_trees(path3):
    assert_allclose(random_cyclic_flow(path3, seed=3), 0.0, atol=1e-12)


def test_mask_flow_counts_and_zeroing(rng):
    f = rng.standard_normal(914)
    masked, mask = mask_flow(f, 0.1, seed=3)
    hidden = mask.unobserved(914)
    assert hidden.size == 91
    assert_array_equal(masked[hidden], 0.0)
    assert_array_equal(masked[list(mask.observed)], f[list(mask.observed)])

    _, same = mask_flow(f, 0.1, seed=3)
    assert same == mask


def test_mask_flow_without_hiding(rng):
    f = rng.standard_normal(7)
    masked, mask = mask_flow(f, 0.0, seed=0)
    assert_array_equal(masked, f)
    assert mask == MaskSet.all_observed(7)
    with pytest.raises(ValueError):
        mask_flow(f, 1.0, seed=0)


def test_mask_set_rules():
    with pytest.raises(ValueError):
        MaskSet((0, 1), (2,))
    with pytest.raises(ValueError):
        MaskSet((0, 0))
    mask = MaskSet((3, 0, 1), (1,))
    assert mask.observed == (0, 1, 3)
    assert_array_equal(mask.visible(), [0, 3])
    assert_array_equal(mask.unobserved(5), [2, 4])
    assert mask.to_bitstring(5) == "11010"
    assert MaskSet.from_bitstring("11010") == MaskSet((0, 1, 3))


def test_sample_artificial_stays_inside_observed(rng):
    mask = MaskSet(tuple(range(0, 40, 2)))
    picked = sample_artificial(mask, 0.1, rng)
    assert len(picked.artificial) == 2
    assert set(picked.artificial) <= set(mask.observed)
    assert len(sample_artificial(MaskSet((4,)), 0.1, rng).artificial) == 1


def test_restrict_checks_indices():
    assert_array_equal(restrict(np.array([1.0, 2.0, 3.0]), np.array([2])), [0.0, 0.0, 3.0])
    with pytest.raises(DimensionMismatchError):
        restrict(np.ones(2), np.array([5]))


def test_dataset_round_trip(tmp_path, small_partition):
    ds = localization_dataset(small_partition, 6, seed=2)
    g = small_partition.graph
    masks = [mask_flow(r.flow, 0.2, seed=i)[1] for i, r in enumerate(ds.records)]
    ds = ds.with_masks(masks[:3] + [None] * 3)

    save_dataset(ds, tmp_path / "ds")
    manifest = json.loads((tmp_path / "ds" / "manifest.json").read_text())
    assert manifest["schema_version"] == 1
    assert manifest["record_count"] == 6 and manifest["num_edges"] == g.num_edges

    loaded = load_dataset(tmp_path / "ds")
    assert loaded.graph == g
    assert loaded.generator == "localization" and loaded.seed == 2
    assert loaded.label_map == ds.label_map
    assert_array_equal(loaded.flows(), ds.flows())
    assert_array_equal(loaded.labels(), ds.labels())
    assert [r.mask for r in loaded.records] == masks[:3] + [None] * 3
    assert [r.time for r in loaded.records] == [r.time for r in ds.records]


def test_dataset_without_labels_round_trip(tmp_path, triangle):
    ds = Dataset(triangle, (FlowRecord(np.array([0.5, -1.0, 2.0])),))
    save_dataset(ds, tmp_path / "ds")
    loaded = load_dataset(tmp_path / "ds")
    assert loaded.records[0].label is None and loaded.records[0].source is None
    assert_array_equal(loaded.flows(), ds.flows())


def test_dataset_rejects_wrong_flow_length(triangle):
    with pytest.raises(DimensionMismatchError):
        Dataset(triangle, (FlowRecord(np.ones(2)),))


def test_dataset_rejects_unknown_schema(tmp_path, triangle):
    save_dataset(Dataset(triangle, ()), tmp_path / "ds")
    manifest = tmp_path / "ds" / "manifest.json"
    content = json.loads(manifest.read_text())
    content["schema_version"] = 99
    manifest.write_text(json.dumps(content))
    with pytest.raises(ValueError):
        load_dataset(tmp_path / "ds")
