import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dea_mrs import dataset
from dea_mrs.dataset import Dataset, Dmu
from dea_mrs.errors import DatasetError, ParseError, ValidationError

TABLE1 = """# seven DMUs, one input, one output
name,i:I,o:O
DMU1,1,1
DMU2,2,3
DMU3,3,4
DMU4,4,5
DMU5,6,6
DMU6,5,4
DMU7,4,3
"""


def test_load_table1_file(tmp_path):
    p = tmp_path / "t1.csv"
    p.write_text(TABLE1)
    ds = dataset.load_csv(p)
    assert (ds.n, ds.m, ds.s) == (7, 1, 1)
    assert ds.names[5] == "DMU6"
    assert ds.X[5, 0] == 5.0 and ds.Y[5, 0] == 4.0


def test_bundled_copy_matches():
    assert dataset.table1() == dataset.parse_csv(TABLE1)


def test_single_dmu():
    ds = dataset.parse_csv("name,i:x,o:y\nA,1,1\n")
    assert ds.n == 1


def test_negative_input_rejected():
    with pytest.raises(ValidationError) as err:
        dataset.parse_csv("name,i:x,o:y\nA,-1,1\n")
    assert "negative" in str(err.value)


def test_table1_is_valid():
    assert dataset.validate(dataset.table1()) == []


def test_zero_output_vector_named():
    ds = Dataset((Dmu("A", [1.0], [2.0]), Dmu("B", [1.0], [0.0])), ["x"], ["y"])
    problems = dataset.validate(ds)
    assert len(problems) == 1 and "'B'" in problems[0]


def test_input_count_mismatch():
    ds = Dataset((Dmu("A", [1.0, 2.0], [2.0]), Dmu("B", [1.0], [1.0])), ["x"], ["y"])
    problems = dataset.validate(ds)
    assert len(problems) == 1 and "'A'" in problems[0]


def test_partial_zero_accepted():
    ds = dataset.parse_csv("name,i:a,i:b,o:y\nA,0,1,1\nB,2,0,3\n")
    assert ds.m == 2


def test_duplicate_names_rejected():
    with pytest.raises(ValidationError):
        dataset.parse_csv("name,i:x,o:y\nA,1,1\nA,2,2\n")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "# only a comment\n",
        "label,i:x,o:y\nA,1,1\n",
        "name,x,o:y\nA,1,1\n",
        "name,o:y,i:x\nA,1,1\n",
        "name,i:x,o:y\nA,1\n",
        "name,i:x,o:y\nA,1,abc\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        dataset.parse_csv(text)


def test_errors_are_value_errors():
    assert issubclass(ParseError, ValueError) and issubclass(ValidationError, DatasetError)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        dataset.load_csv(tmp_path / "absent.csv")


def test_comment_and_blank_lines_skipped():
    text = "\n# header follows\nname,i:x,o:y\n\n  # indented comment\nA,1,2\n"
    assert dataset.parse_csv(text).n == 1


def test_row_order_is_index_order():
    ds = dataset.table1()
    for k, name in enumerate(["DMU1", "DMU2", "DMU3", "DMU4", "DMU5", "DMU6", "DMU7"]):
        assert ds.index(name) == k


def test_arrays_read_only():
    ds = dataset.table1()
    with pytest.raises(ValueError):
        ds.X[0, 0] = 9.0


def test_file_round_trip(tmp_path):
    ds = dataset.table1()
    p = tmp_path / "out.csv"
    dataset.save_csv(ds, p)
    assert dataset.load_csv(p) == ds


_value = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def datasets(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 3))
    s = draw(st.integers(1, 3))
    X = np.array(draw(st.lists(st.lists(_value, min_size=m, max_size=m), min_size=n, max_size=n)))
    Y = np.array(draw(st.lists(st.lists(_value, min_size=s, max_size=s), min_size=n, max_size=n)))
    X[:, 0] += 1.0
    Y[:, 0] += 1.0
    names = [f"u{j}, \"q\"" if j % 2 else f"u{j}" for j in range(n)]
    return Dataset.from_arrays(X, Y, names)


@settings(max_examples=60, deadline=None)
@given(datasets())
def test_serialize_round_trip(ds):
    assert dataset.parse_csv(dataset.to_csv(ds)) == ds
