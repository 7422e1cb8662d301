from typing import Annotated

import pytest
from pydantic import ValidationError

from orbit_sdk import ExperimentTable, experiment, modulus, positional
from orbit_sdk.checkpoint import Checkpoint, active_checkpoint, partial_path, sweep
from orbit_sdk.config import Settings, load_settings, worker_count
from orbit_sdk.exceptions import ExperimentError
from orbit_sdk.output import OutputFormat, build_report, format_cell, render
from orbit_sdk.parallel import ordered_map


def _square_table(m: int) -> ExperimentTable:
    return ExperimentTable(columns=["m", "square"], rows=[[m, m * m]])


def test_table_rejects_ragged_rows():
    with pytest.raises(ValidationError):
        ExperimentTable(columns=["a", "b"], rows=[[1]])


def test_table_concat():
    table = ExperimentTable.concat([_square_table(2), _square_table(3)])
    assert table.rows == [[2, 4], [3, 9]]
    with pytest.raises(ValueError):
        ExperimentTable.concat([_square_table(2), ExperimentTable(columns=["x"])])


@pytest.mark.parametrize(
    "value, text", [(True, "true"), (False, "false"), (0.1, "0.1"), (3, "3"), ("1/2", "1/2")]
)
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_csv_rendering():
    table = ExperimentTable(columns=["m", "ok"], rows=[[5, True]], summary={"total": 1})
    text = render(build_report("demo", {"m": [5], "mode": "x"}, table), OutputFormat.CSV)
    lines = text.splitlines()
    assert lines[:2] == ["m,ok", "5,true"]
    assert lines[2:] == sorted(lines[2:])
    assert "# param.m=[5]" in lines
    assert "# param.mode=x" in lines
    assert "# result.total=1" in lines


def test_experiment_metadata():
    @experiment(name="metadata-demo", sweep=True)
    def demo(
        x: Annotated[str, positional("p/q")], m: Annotated[list[int], modulus()], k: int = 2
    ) -> ExperimentTable:
        """First line of help."""
        return ExperimentTable(columns=["k"], rows=[[k]])

    data = demo.experiment_data
    assert data.positional_params == {"x": "p/q"}
    assert data.modulus_params == ["m"]
    assert data.description == "First line of help."
    assert demo("1/2", [3]).rows == [[2]]
    assert demo.invoke({"x": "1/2", "m": [3], "k": 4}).rows == [[4]]


def test_invalid_parameters():
    @experiment(name="params-demo")
    def demo(k: int) -> ExperimentTable:
        return ExperimentTable(columns=["k"], rows=[[k]])

    with pytest.raises(ExperimentError):
        demo.invoke({"k": "many"})
    with pytest.raises(ExperimentError):
        demo.invoke({"k": 1, "extra": 2})
    with pytest.raises(ExperimentError):
        demo.on_invoke("[1, 2]")


def test_stochastic_experiments_need_a_seed():
    with pytest.raises(ExperimentError):

        @experiment(name="seedless", stochastic=True)
        def seedless(n: int) -> ExperimentTable:
            return ExperimentTable(columns=["n"])


def test_settings_defaults_without_pyproject(tmp_path):
    settings = load_settings(tmp_path / "pyproject.toml")
    assert settings == Settings()
    assert settings.modules == ["experiments"]


def test_settings_reject_unknown_keys(tmp_path):
    path = tmp_path / "pyproject.toml"
    path.write_text("[tool.orbitlab]\nmax_moduls = 5\n")
    with pytest.raises(ExperimentError):
        load_settings(path)


def test_settings_reject_bad_toml(tmp_path):
    path = tmp_path / "pyproject.toml"
    path.write_text("[tool.orbitlab\n")
    with pytest.raises(ExperimentError):
        load_settings(path)


def test_settings_read_table(tmp_path):
    path = tmp_path / "pyproject.toml"
    path.write_text("[tool.orbitlab]\npadic_precision = 32\nshear_epsilon = 0.2\n")
    settings = load_settings(path)
    assert settings.padic_precision == 32
    assert settings.shear_epsilon == 0.2


@pytest.mark.parametrize("raw", ["zero", "0", "-3"])
def test_worker_count_validation(raw, monkeypatch):
    monkeypatch.setenv("ORBITLAB_THREADS", raw)
    with pytest.raises(ExperimentError):
        worker_count()


def test_worker_count_default(monkeypatch):
    monkeypatch.delenv("ORBITLAB_THREADS", raising=False)
    assert worker_count() == 1


def test_ordered_map_keeps_input_order():
    assert list(ordered_map(abs, [-3, 1, -2], workers=1)) == [3, 1, 2]
    assert list(ordered_map(abs, [-3, 1, -2], workers=2)) == [3, 1, 2]


def test_sweep_without_checkpoint():
    tables = sweep([4, 2, 4], _square_table, workers=1)
    assert [t.rows for t in tables] == [[[4, 16]], [[2, 4]], [[4, 16]]]


def test_sweep_records_and_resumes(tmp_path):
    output = tmp_path / "squares.csv"
    checkpoint = Checkpoint(output, "squares")
    with active_checkpoint(checkpoint):
        sweep([2, 3], _square_table, workers=1)
    lines = partial_path(output).read_text().splitlines()
    assert len(lines) == 3

    computed = []

    def tracked(m: int) -> ExperimentTable:
        computed.append(m)
        return _square_table(m)

    with active_checkpoint(Checkpoint(output, "squares", resume=True)):
        tables = sweep([2, 3, 5], tracked, workers=1)
    assert computed == [5]
    assert [t.rows[0] for t in tables] == [[2, 4], [3, 9], [5, 25]]


def test_torn_checkpoint_line_is_skipped(tmp_path):
    output = tmp_path / "squares.csv"
    checkpoint = Checkpoint(output, "squares")
    checkpoint.record(2, _square_table(2))
    with open(partial_path(output), "a") as f:
        f.write('{"key": 3, "tab')
    resumed = Checkpoint(output, "squares", resume=True)
    assert resumed.get(2) is not None
    assert resumed.get(3) is None


def test_checkpoint_fingerprint_mismatch(tmp_path):
    output = tmp_path / "squares.csv"
    Checkpoint(output, "squares")
    with pytest.raises(ExperimentError):
        Checkpoint(output, "cubes", resume=True)


def test_finish_removes_checkpoint(tmp_path):
    output = tmp_path / "squares.csv"
    checkpoint = Checkpoint(output, "squares")
    checkpoint.finish()
    assert not partial_path(output).exists()
