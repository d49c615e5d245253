"""Graph builder: encodings, binning, edge arithmetic, masks, container."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vargraph.mlgraph import (
    ClassBinning,
    GraphRecipe,
    RecipeError,
    assemble_graph,
    assign_masks,
    build_edges,
    edge_weights,
    encode_features,
    export_graph,
    extract_gene,
    import_graph,
)
from vargraph.rdf import XSD_DOUBLE, XSD_FLOAT, XSD_INTEGER, Iri, Literal
from vargraph.sparql.table import ResultTable


def _lit(x):
    return Literal(str(x))


def _num(x, dt=XSD_DOUBLE):
    return Literal(repr(float(x)), datatype=dt)


def _table(columns, rows):
    return ResultTable(columns=columns, rows=[tuple(r) for r in rows])


def _recipe(**kwargs):
    defaults = dict(feature_columns=("ref",), label_column="phred")
    defaults.update(kwargs)
    return GraphRecipe(**defaults)


# --- encoding -----------------------------------------------------------------


def test_first_seen_dictionary_encoding():
    table = _table(["ref", "phred"], [
        [_lit("G"), _num(5)], [_lit("A"), _num(15)], [_lit("G"), _num(25)],
    ])
    features, labels, dicts, names = encode_features(table, _recipe())
    np.testing.assert_array_equal(features[:, 0], [0.0, 1.0, 0.0])
    assert dicts.columns["ref"] == ["G", "A"]
    assert names == ["ref"]


def test_default_phred_binning():
    table = _table(["ref", "phred"], [
        [_lit("G"), _num(12.72)], [_lit("A"), _num(3.1)], [_lit("C"), _num(25.0)],
    ])
    _, labels, dicts, _ = encode_features(table, _recipe())
    # intervals [0,10) [10,20) [20,30) [30,inf) -> classes 1, 0, 2
    assert labels.tolist() == [1, 0, 2]
    assert dicts.label_classes == ["[0,10)", "[10,20)", "[20,30)"]


def test_binning_intervals():
    binning = ClassBinning()
    assert [binning.class_of(x) for x in (0.0, 9.99, 10.0, 19.9, 25.0, 30.0, 99.0)] == \
        [0, 0, 1, 1, 2, 3, 3]
    assert binning.class_names() == ["[0,10)", "[10,20)", "[20,30)", "[30,inf)"]


def test_numeric_nulls_get_presence_column():
    table = _table(["qual", "phred"], [
        [_num(50), _num(5)], [None, _num(15)], [_num(20), _num(25)],
    ])
    features, _, _, names = encode_features(table, _recipe(feature_columns=("qual",)))
    assert names == ["qual", "qual__present"]
    np.testing.assert_array_equal(features[:, 0], [50.0, 0.0, 20.0])
    np.testing.assert_array_equal(features[:, 1], [1.0, 0.0, 1.0])


def test_categorical_nulls_use_reserved_code():
    table = _table(["ref", "phred"], [
        [_lit("G"), _num(5)], [None, _num(15)], [_lit("A"), _num(25)],
    ])
    features, _, dicts, _ = encode_features(table, _recipe())
    np.testing.assert_array_equal(features[:, 0], [0.0, -1.0, 1.0])
    assert dicts.decode("ref", -1) is None
    assert dicts.decode("ref", 0) == "G"


def test_dictionary_roundtrip_property():
    rng = random.Random(3)
    values = [rng.choice(["a", "b", "c", "d", "e"]) for _ in range(60)]
    table = _table(["col", "phred"], [
        [_lit(v), _num(rng.choice([5, 15]))] for v in values
    ])
    features, _, dicts, _ = encode_features(table, _recipe(feature_columns=("col",)))
    decoded = [dicts.decode("col", int(code)) for code in features[:, 0]]
    assert decoded == values
    for v in set(values):
        assert dicts.decode("col", dicts.encode("col", v)) == v


def test_standardize_z_scores_numeric_columns():
    table = _table(["qual", "ref", "phred"], [
        [_num(10), _lit("G"), _num(5)],
        [_num(20), _lit("A"), _num(15)],
        [_num(30), _lit("G"), _num(25)],
    ])
    recipe = _recipe(feature_columns=("qual", "ref"), standardize=True)
    features, _, _, names = encode_features(table, recipe)
    column = features[:, names.index("qual")]
    assert column.mean() == pytest.approx(0.0)
    assert column.std() == pytest.approx(1.0)
    # dictionary codes are identities, never scaled
    np.testing.assert_array_equal(features[:, names.index("ref")], [0.0, 1.0, 0.0])


def test_standardize_skips_constant_and_missing_cells():
    table = _table(["qual", "phred"], [
        [_num(7), _num(5)], [None, _num(15)], [_num(7), _num(25)],
    ])
    recipe = _recipe(feature_columns=("qual",), standardize=True)
    features, _, _, names = encode_features(table, recipe)
    np.testing.assert_array_equal(features[:, names.index("qual")], [7.0, 0.0, 7.0])
    np.testing.assert_array_equal(features[:, names.index("qual__present")],
                                  [1.0, 0.0, 1.0])


def test_label_entirely_null_rejected():
    table = _table(["ref", "phred"], [[_lit("G"), None], [_lit("A"), None]])
    with pytest.raises(RecipeError, match="entirely null"):
        encode_features(table, _recipe())


def test_label_partial_null_rejected():
    table = _table(["ref", "phred"], [[_lit("G"), _num(5)], [_lit("A"), None]])
    with pytest.raises(RecipeError, match="null cells"):
        encode_features(table, _recipe())


def test_single_class_rejected():
    table = _table(["ref", "phred"], [[_lit("G"), _num(5)], [_lit("A"), _num(6)]])
    with pytest.raises(RecipeError, match="fewer than 2"):
        encode_features(table, _recipe())


def test_iri_cells_encode_by_value():
    table = _table(["ref", "phred"], [
        [Iri("sg://0.99.11/vcf2rdf/sequence/G"), _num(5)],
        [Iri("sg://0.99.11/vcf2rdf/sequence/A"), _num(15)],
        [Iri("sg://0.99.11/vcf2rdf/sequence/G"), _num(25)],
    ])
    features, _, dicts, _ = encode_features(table, _recipe())
    np.testing.assert_array_equal(features[:, 0], [0.0, 1.0, 0.0])
    assert dicts.columns["ref"][0].endswith("/G")


def test_label_can_be_categorical():
    table = _table(["pos", "impact"], [
        [_num(1, XSD_INTEGER), _lit("HIGH")],
        [_num(2, XSD_INTEGER), _lit("LOW")],
        [_num(3, XSD_INTEGER), _lit("HIGH")],
    ])
    _, labels, dicts, _ = encode_features(
        table, _recipe(feature_columns=("pos",), label_column="impact"))
    assert labels.tolist() == [0, 1, 0]
    assert dicts.label_classes == ["HIGH", "LOW"]


# --- edges ----------------------------------------------------------------------


def _gene_table(genes):
    return _table(["g", "phred"], [
        [None if g is None else _lit(g), _num(5 if i % 2 else 15)]
        for i, g in enumerate(genes)
    ])


def test_fully_connected_bidirectional_count():
    table = _gene_table(["x"] * 4)
    recipe = _recipe(feature_columns=("g",), edge_policy="fully_connected")
    edges, weights = build_edges(table, recipe)
    assert len(edges) == 12  # n(n-1)
    assert set(map(tuple, edges)) == {(u, v) for u in range(4) for v in range(4) if u != v}
    np.testing.assert_array_equal(weights, np.ones(12))


def test_fully_connected_directed_once():
    table = _gene_table(["x"] * 5)
    recipe = _recipe(feature_columns=("g",), edge_policy="fully_connected",
                     bidirectional=False)
    edges, _ = build_edges(table, recipe)
    assert len(edges) == 10  # n(n-1)/2
    assert all(u < v for u, v in edges)


def test_gene_cliques():
    genes = ["g1", "g1", "g1", "g2", "g2"]
    recipe = _recipe(feature_columns=("g",), gene_column="g")
    edges, _ = build_edges(_gene_table(genes), recipe)
    assert len(edges) == 6 + 2  # per-gene n_g(n_g-1)


def test_gene_clique_from_ann_split():
    ann = [
        "A|eff|MOD|GENE1|ID1|x", "T|eff|LOW|GENE1|ID2|x", "C|eff|HIGH|GENE2|ID3|x",
    ]
    table = _table(["ann_split_1", "phred"], [
        [_lit(a), _num(5 + 10 * i)] for i, a in enumerate(ann)
    ])
    recipe = _recipe(feature_columns=("ann_split_1",))
    edges, _ = build_edges(table, recipe)
    assert set(map(tuple, edges)) == {(0, 1), (1, 0)}


def test_null_gene_rows_stay_isolated():
    genes = ["g1", None, "g1", ""]
    recipe = _recipe(feature_columns=("g",), gene_column="g")
    edges, _ = build_edges(_gene_table(genes), recipe)
    assert set(map(tuple, edges)) == {(0, 2), (2, 0)}


def test_extract_gene_variants():
    assert extract_gene(_lit("A|eff|MOD|GENE1|ID1")) == "GENE1"
    assert extract_gene(_lit("GENE9")) == "GENE9"
    assert extract_gene(_lit("A|eff|MOD")) is None
    assert extract_gene(None) is None
    assert extract_gene(_lit("")) is None


def test_fully_connected_cap_refusal():
    table = _gene_table(["x"] * 12)
    recipe = _recipe(feature_columns=("g",), edge_policy="fully_connected",
                     fully_connected_cap=10)
    with pytest.raises(RecipeError, match="O\\(n\\^2\\)"):
        build_edges(table, recipe)


def test_gene_clique_cap_refusal():
    table = _gene_table(["g1"] * 8)
    recipe = _recipe(feature_columns=("g",), gene_column="g", gene_clique_cap=5)
    with pytest.raises(RecipeError, match="clique"):
        build_edges(table, recipe)


def test_in_degree_weights_on_cycle():
    edges = np.array([(0, 1), (1, 2), (2, 0)])
    weights = edge_weights(edges, 3, "in_degree")
    np.testing.assert_array_equal(weights, np.ones(3))


def test_in_degree_weights_use_destination():
    edges = np.array([(0, 2), (1, 2), (2, 0)])
    weights = edge_weights(edges, 3, "in_degree")
    np.testing.assert_array_equal(weights, [2.0, 2.0, 1.0])


def test_user_value_weights():
    edges = np.array([(0, 1)])
    np.testing.assert_array_equal(edge_weights(edges, 2, "user", 0.25), [0.25])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=40), st.booleans())
def test_gene_edge_count_formula(gene_ids, bidirectional):
    genes = [f"g{i}" for i in gene_ids]
    recipe = _recipe(feature_columns=("g",), gene_column="g",
                     bidirectional=bidirectional)
    edges, _ = build_edges(_gene_table(genes), recipe)
    sizes = {}
    for g in genes:
        sizes[g] = sizes.get(g, 0) + 1
    expected = sum(n * (n - 1) for n in sizes.values())
    if not bidirectional:
        expected //= 2
    assert len(edges) == expected


# --- masks ---------------------------------------------------------------------


def test_mask_sizes_default_split():
    train, val, test = assign_masks(10, 80, 10, seed=1)
    assert (train.sum(), val.sum(), test.sum()) == (8, 1, 1)


def test_mask_sizes_1003():
    train, val, test = assign_masks(1003, 80, 10, seed=1)
    assert (train.sum(), val.sum(), test.sum()) == (802, 100, 101)
    combined = train.astype(int) + val.astype(int) + test.astype(int)
    assert (combined == 1).all()


def test_masks_deterministic():
    a = assign_masks(50, 70, 20, seed=9)
    b = assign_masks(50, 70, 20, seed=9)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 500), st.integers(0, 100), st.integers(0, 100), st.integers(0, 99))
def test_mask_partition_property(n, train_pct, val_pct, seed):
    if train_pct + val_pct > 100:
        train_pct, val_pct = val_pct % 50, train_pct % 50
    train, val, test = assign_masks(n, train_pct, val_pct, seed)
    combined = train.astype(int) + val.astype(int) + test.astype(int)
    assert (combined == 1).all()
    assert train.sum() == n * train_pct // 100
    assert val.sum() == n * val_pct // 100


# --- recipe / assembly / container -------------------------------------------


def test_recipe_validation():
    with pytest.raises(RecipeError, match="label column"):
        GraphRecipe(feature_columns=("a",), label_column="a")
    with pytest.raises(RecipeError, match="exceed"):
        GraphRecipe(feature_columns=("a",), label_column="b", train_pct=95, val_pct=10)
    with pytest.raises(RecipeError, match="edge policy"):
        GraphRecipe(feature_columns=("a",), label_column="b", edge_policy="ring")
    with pytest.raises(RecipeError, match="unknown recipe keys"):
        GraphRecipe.from_dict({"feature_columns": ["a"], "label_column": "b", "nope": 1})


def test_assemble_graph_summary_reflects_graph():
    ann = ["A|e|M|G1|I1", "T|e|L|G1|I2", "C|e|H|G2|I3", "G|e|H|G2|I4"]
    table = _table(["ann_split_1", "qual", "phred"], [
        [_lit(a), _num(40 + i), _num(5 + 9 * i)] for i, a in enumerate(ann)
    ])
    recipe = _recipe(feature_columns=("ann_split_1", "qual"), train_pct=50, val_pct=25)
    graph = assemble_graph(table, recipe)
    summary = graph.summary()
    assert summary.num_nodes == 4
    assert summary.num_edges == len(graph.edges) == 4
    assert summary.num_classes == graph.num_classes
    assert summary.features == ["ann_split_1", "qual"]
    assert summary.split == (50, 25, 25)
    assert summary.feature_dim == graph.node_features.shape[1]


def test_assemble_graph_deterministic():
    table = _table(["ref", "phred"], [
        [_lit("G"), _num(5)], [_lit("A"), _num(15)], [_lit("G"), _num(25)],
    ])
    recipe = _recipe(edge_policy="fully_connected")
    g1 = assemble_graph(table, recipe)
    g2 = assemble_graph(table, recipe)
    assert g1.equals(g2)


def test_export_import_roundtrip(tmp_path):
    ann = ["A|e|M|G1|I1", "T|e|L|G1|I2", "C|e|H|G2|I3"]
    table = _table(["ann_split_1", "phred"], [
        [_lit(a), _num(5 + 10 * i)] for i, a in enumerate(ann)
    ])
    graph = assemble_graph(table, _recipe(feature_columns=("ann_split_1",)))
    path = tmp_path / "graph.bin"
    export_graph(graph, path)
    assert import_graph(path).equals(graph)


def test_export_import_empty_edges(tmp_path):
    table = _table(["g", "phred"], [[None, _num(5)], [None, _num(15)]])
    graph = assemble_graph(table, _recipe(feature_columns=("g",), gene_column="g"))
    assert len(graph.edges) == 0
    path = tmp_path / "empty.bin"
    export_graph(graph, path)
    assert import_graph(path).equals(graph)


def test_missing_gene_column_is_a_recipe_error():
    table = _table(["ref", "phred"], [[_lit("G"), _num(5)], [_lit("A"), _num(15)]])
    with pytest.raises(RecipeError, match="ann_split_1"):
        build_edges(table, _recipe())


def test_import_detects_corruption(tmp_path):
    table = _table(["ref", "phred"], [[_lit("G"), _num(5)], [_lit("A"), _num(15)]])
    graph = assemble_graph(table, _recipe(edge_policy="fully_connected"))
    path = tmp_path / "graph.bin"
    export_graph(graph, path)
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0x01
    path.write_bytes(bytes(data))
    with pytest.raises(Exception, match="checksum|container"):
        import_graph(path)


def test_random_graph_roundtrip(tmp_path):
    rng = random.Random(12)
    rows = []
    for i in range(1000):
        rows.append([
            _lit(f"A|e|M|G{rng.randrange(40)}|I{i}"),
            _num(rng.uniform(0, 60)),
            _num(rng.uniform(0, 40)),
        ])
    table = _table(["ann_split_1", "qual", "phred"], rows)
    graph = assemble_graph(table, _recipe(feature_columns=("ann_split_1", "qual")))
    path = tmp_path / "big.bin"
    export_graph(graph, path)
    assert import_graph(path).equals(graph)
