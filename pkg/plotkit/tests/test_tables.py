"""Table contract validation."""

import numpy as np
import pytest

from plotkit import ContractError, read_table
from plotkit.tables import COLUMNS

from conftest import write_csv


def test_valid_table_round_trips(tmp_path):
    p = write_csv(tmp_path / "norm.csv", "t,norm2", [(0.0, 1.0), (0.1, 0.9)])
    data = read_table(p, COLUMNS["norm"])
    assert data.shape == (2, 2)
    assert data[1, 1] == 0.9


def test_missing_column_is_named(tmp_path):
    p = write_csv(tmp_path / "bad.csv", "t,psi2", [(0.0, 1.0)])
    with pytest.raises(ContractError, match=r"missing columns \['x'\]"):
        read_table(p, COLUMNS["psi2_heatmap"])


def test_unexpected_column_is_named(tmp_path):
    p = write_csv(tmp_path / "bad.csv", "t,norm2,extra", [(0.0, 1.0, 2.0)])
    with pytest.raises(ContractError, match=r"unexpected columns \['extra'\]"):
        read_table(p, COLUMNS["norm"])


def test_wrong_column_order_is_reported(tmp_path):
    p = write_csv(tmp_path / "bad.csv", "norm2,t", [(1.0, 0.0)])
    with pytest.raises(ContractError, match="column order"):
        read_table(p, COLUMNS["norm"])


def test_header_only_file_reports_no_data(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("t,norm2\n")
    with pytest.raises(ContractError, match="no data"):
        read_table(str(p), COLUMNS["norm"])


def test_zero_byte_file_is_rejected(tmp_path):
    p = tmp_path / "zero.csv"
    p.write_text("")
    with pytest.raises(ContractError, match="empty file"):
        read_table(str(p), COLUMNS["norm"])


def test_non_numeric_cell_is_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,norm2\n0.0,oops\n")
    with pytest.raises(ContractError, match="non-numeric"):
        read_table(str(p), COLUMNS["norm"])


def test_missing_file_is_rejected(tmp_path):
    with pytest.raises(ContractError, match="not found"):
        read_table(str(tmp_path / "absent.csv"), COLUMNS["norm"])


def test_full_precision_survives(tmp_path):
    value = 0.12345678901234567
    p = write_csv(tmp_path / "norm.csv", "t,norm2", [(0.0, value)])
    data = read_table(p, COLUMNS["norm"])
    assert data[0, 1] == value
    assert np.float64(data[0, 1]).hex() == np.float64(value).hex()
