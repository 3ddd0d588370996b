"""Reader contracts: exact schemas, loud failures, frozen reference files."""

from pathlib import Path

import numpy as np
import pytest

from risloc_plots import (
    SWEEP_COLUMNS,
    NoDataError,
    SchemaError,
    read_spectrum_grid,
    read_sweep_csv,
)

DATA = Path(__file__).parent / "data"

HEADER = ",".join(SWEEP_COLUMNS)
ROW = ",".join(str(float(i)) for i in range(len(SWEEP_COLUMNS)))


def test_reads_frozen_sweep_csv():
    data = read_sweep_csv(DATA / "nmse_vs_snr.csv")
    assert set(data) == set(SWEEP_COLUMNS)
    assert all(len(col) == 4 for col in data.values())
    np.testing.assert_allclose(data["snr_db"], [-15.0, -10.0, -5.0, 0.0])
    assert np.all(np.isfinite(data["nmse_db_proposed"]))


def test_frozen_curves_are_plausible():
    # the committed fixtures must stay consistent with what they plot:
    # error decreasing in SNR, the baseline never worse than the proposal
    snr = read_sweep_csv(DATA / "nmse_vs_snr.csv")
    assert np.all(np.diff(snr["nmse_db_proposed"]) < 0)
    assert np.all(snr["nmse_db_oracle"] <= snr["nmse_db_proposed"])
    se = read_sweep_csv(DATA / "se_vs_snr.csv")
    assert np.all(np.diff(se["se_proposed"]) > 0)


def test_missing_column_is_named(tmp_path):
    path = tmp_path / "bad.csv"
    cut = [c for c in SWEEP_COLUMNS if c != "seed"]
    path.write_text(",".join(cut) + "\n" + ROW.rsplit(",", 1)[0] + "\n")
    with pytest.raises(SchemaError, match="seed"):
        read_sweep_csv(path)


def test_unexpected_column_is_named(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + ",bogus\n" + ROW + ",1.0\n")
    with pytest.raises(SchemaError, match="bogus"):
        read_sweep_csv(path)


def test_header_only_csv_is_no_data(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# comment\n" + HEADER + "\n")
    with pytest.raises(NoDataError):
        read_sweep_csv(path)


def test_blank_file_is_no_data(tmp_path):
    path = tmp_path / "blank.csv"
    path.write_text("\n")
    with pytest.raises(NoDataError):
        read_sweep_csv(path)


def test_ragged_row_is_rejected_with_location(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text(HEADER + "\n" + ROW + "\n1.0,2.0\n")
    with pytest.raises(SchemaError, match="row 3"):
        read_sweep_csv(path)


def test_non_numeric_cell_names_row_and_column(tmp_path):
    path = tmp_path / "text.csv"
    cells = ROW.split(",")
    cells[6] = "oops"
    path.write_text(HEADER + "\n" + ",".join(cells) + "\n")
    with pytest.raises(SchemaError, match="nmse_db_proposed"):
        read_sweep_csv(path)


def test_comments_and_blank_lines_are_skipped(tmp_path):
    path = tmp_path / "ok.csv"
    path.write_text("# a\n\n" + HEADER + "\n# mid\n" + ROW + "\n\n")
    data = read_sweep_csv(path)
    assert len(data["snr_db"]) == 1


def test_reads_frozen_spectrum_grid():
    phi, psi, values = read_spectrum_grid(DATA / "spectrum.txt")
    assert phi.shape == (181,) and psi.shape == (181,)
    assert values.shape == (181, 181)
    assert phi[0] == 0.0 and phi[-1] == 90.0
    assert np.all(values > 0)
    # the reference dump peaks one half-cell off the design direction
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    assert abs(phi[i] - 50.0) <= 0.5
    assert abs(psi[j] - 30.0) <= 0.5


def test_malformed_grids_are_rejected(tmp_path):
    flat = tmp_path / "flat.txt"
    flat.write_text("1.0 2.0 3.0\n")
    with pytest.raises(SchemaError):
        read_spectrum_grid(flat)
    text = tmp_path / "text.txt"
    text.write_text("0 1\nx 2\n")
    with pytest.raises(SchemaError):
        read_spectrum_grid(text)
    hole = tmp_path / "hole.txt"
    hole.write_text("0 1 2\n1 1 nan\n2 3 4\n")
    with pytest.raises(SchemaError, match="finite"):
        read_spectrum_grid(hole)
    negative = tmp_path / "neg.txt"
    negative.write_text("0 1 2\n1 1 -3\n2 3 4\n")
    with pytest.raises(SchemaError, match="positive"):
        read_spectrum_grid(negative)
