import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gdcscreen.core import (
    ConfigError,
    DataError,
    Dataset,
    GroupPartition,
    Measure,
    ScreeningConfig,
    Threshold,
    TopD,
    load_csv,
    load_groups,
    singleton_partition,
    write_csv,
    write_groups,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_two_classes(tmp_path):
    path = write(tmp_path, "d.csv", "X1,X2,y\n1,2,a\n3,4,a\n5,6.5e-1,b\n7,8,b\n")
    ds = load_csv(path, "y")
    assert ds.n_classes == 2
    assert list(ds.class_counts) == [2, 2]
    assert ds.column_names == ("X1", "X2")
    np.testing.assert_array_equal(ds.features[:, 1], [2, 4, 0.65, 8])


def test_load_csv_label_by_index_and_first_appearance_order(tmp_path):
    path = write(tmp_path, "d.csv", "y,X1\nz,1\na,2\nz,3\n")
    ds = load_csv(path, 0)
    assert ds.class_names == ("z", "a")
    assert list(ds.labels) == [0, 1, 0]


def test_load_csv_single_class(tmp_path):
    path = write(tmp_path, "d.csv", "X1,y\n1,a\n2,a\n")
    with pytest.raises(DataError, match="only one class"):
        load_csv(path, "y")


@pytest.mark.parametrize("cell", ["NaN", "inf", "-Infinity"])
def test_load_csv_non_finite(tmp_path, cell):
    path = write(tmp_path, "d.csv", f"X1,X2,y\n1,2,a\n3,{cell},b\n")
    with pytest.raises(DataError, match="line 3, column 'X2'"):
        load_csv(path, "y")


def test_load_csv_parse_error_names_cell(tmp_path):
    path = write(tmp_path, "d.csv", "X1,y\n1,a\nabc,b\n")
    with pytest.raises(DataError, match="'abc' at line 3, column 'X1'"):
        load_csv(path, "y")


def test_load_csv_too_few_rows(tmp_path):
    with pytest.raises(DataError, match="at least 2"):
        load_csv(write(tmp_path, "d.csv", "X1,y\n1,a\n"), "y")


def test_load_csv_missing_label(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_csv(write(tmp_path, "d.csv", "X1,y\n1,a\n2,b\n"), "label")


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset([[1.0]], [0])
    with pytest.raises(DataError, match="only one class"):
        Dataset([[1.0], [2.0]], [0, 0])
    with pytest.raises(DataError, match="no rows"):
        Dataset([[1.0], [2.0]], [0, 2])
    with pytest.raises(DataError, match="non-finite"):
        Dataset([[1.0], [np.nan]], [0, 1])
    ds = Dataset([[1.0], [2.0], [3.0]], [0, 1, 1])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5.0


def test_groups_file(tmp_path):
    ds = Dataset(np.zeros((4, 6)) + np.arange(4)[:, None], [0, 0, 1, 1])
    path = write(tmp_path, "g.txt", "g1: X1,X2,X3\ng2: X4,X5,X6\n")
    part = load_groups(path, ds)
    assert part.r == 2
    assert part.sizes == [3, 3]
    assert part.groups == ((0, 1, 2), (3, 4, 5))
    assert part.warnings == ()


def test_groups_duplicate_column(tmp_path):
    ds = Dataset(np.zeros((4, 6)), [0, 0, 1, 1])
    path = write(tmp_path, "g.txt", "g1: X1,X2\ng2: X1,X3\n")
    with pytest.raises(DataError, match="duplicate column"):
        load_groups(path, ds)


def test_groups_uncovered_column_warns(tmp_path):
    ds = Dataset(np.zeros((4, 6)), [0, 0, 1, 1])
    path = write(tmp_path, "g.txt", "# comment\ng1: X1,X2,X3\n\ng2: X4,4\n")
    part = load_groups(path, ds)
    assert part.groups == ((0, 1, 2), (3, 4))
    assert len(part.warnings) == 1 and "X6" in part.warnings[0]


def test_groups_errors(tmp_path):
    ds = Dataset(np.zeros((4, 3)), [0, 0, 1, 1])
    with pytest.raises(DataError, match="unknown column"):
        load_groups(write(tmp_path, "a.txt", "g1: X1,Q\n"), ds)
    with pytest.raises(DataError, match="empty group"):
        load_groups(write(tmp_path, "b.txt", "g1:\n"), ds)
    with pytest.raises(DataError, match="out of range"):
        load_groups(write(tmp_path, "c.txt", "g1: 7\n"), ds)


def test_singleton_partition():
    assert singleton_partition(3).groups == ((0,), (1,), (2,))
    assert singleton_partition(1).groups == ((0,),)
    with pytest.raises(DataError):
        singleton_partition(0)


def test_partition_invariants():
    with pytest.raises(DataError):
        GroupPartition(((0, 1), (1, 2)))
    with pytest.raises(DataError):
        GroupPartition(((),))
    with pytest.raises(DataError):
        GroupPartition(())


def test_config_rules():
    part = GroupPartition(((0, 1), (2,)))
    with pytest.raises(ConfigError, match="MV requires univariate"):
        ScreeningConfig(Measure.MV, TopD(1)).validate(part)
    with pytest.raises(ConfigError):
        ScreeningConfig(Measure.GDC, TopD(3)).validate(part)
    with pytest.raises(ConfigError):
        TopD(0)
    with pytest.raises(ConfigError):
        Threshold(1.0, 0.5)
    with pytest.raises(ConfigError):
        Threshold(0.0, 0.1)
    assert Threshold(2.0, 0.5 - 1e-9).cutoff(1) == 2.0


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)),
           elements=st.floats(-1e12, 1e12, allow_nan=False, width=64)),
    st.data(),
)
def test_csv_round_trip(tmp_path_factory, X, data):
    n = X.shape[0]
    labels = data.draw(st.lists(st.sampled_from(["a", "b", "c"]), min_size=n, max_size=n))
    if len(set(labels)) < 2:
        labels[0], labels[1] = "a", "b"
    ds = Dataset.from_raw_labels(X, labels)
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(ds, path)
    back = load_csv(path, "label")
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.labels, ds.labels)
    assert back.class_names == ds.class_names


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(8))), st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_groups_round_trip(tmp_path_factory, perm, sizes):
    groups, start = [], 0
    for s in sizes:
        if start + s > 8:
            break
        groups.append(tuple(perm[start:start + s]))
        start += s
    part = GroupPartition(tuple(groups))
    ds = Dataset(np.zeros((2, 8)), [0, 1])
    path = tmp_path_factory.mktemp("g") / "g.txt"
    write_groups(part, path, ds.column_names)
    back = load_groups(path, ds)
    assert back.groups == part.groups
    assert back.group_labels == part.group_labels
