import json

import pytest

from orbit_sdk import ExperimentTable, experiment
from orbit_sdk.checkpoint import Checkpoint, partial_path
from orbit_sdk.cli import main
from orbit_sdk.config import get_settings
from orbitlab.exceptions import InvariantViolation

from experiments.models import MirrorRow


@experiment(name="always-inconsistent")
def always_inconsistent() -> ExperimentTable:
    """Raises an invariant violation."""
    raise InvariantViolation("the books do not balance")


@pytest.fixture(autouse=True)
def project_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ORBITLAB_THREADS", raising=False)
    get_settings.cache_clear()
    yield tmp_path
    get_settings.cache_clear()


def run(*argv: str) -> int:
    with pytest.raises(SystemExit) as exc_info:
        main(list(argv))
    return exc_info.value.code


def test_cfe_to_stdout(capsys):
    assert run("cfe", "3/7") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,quotient,orbit_point,convergent"
    assert lines[1] == "1,2,3/7,1/2"
    assert lines[2] == "2,3,1/3,3/7"
    assert "# result.word=[0;2,3]" in lines
    assert "# result.len=2" in lines
    assert "# param.x=3/7" in lines
    assert "# experiment=cfe" in lines


def test_cfe_json(capsys):
    assert run("cfe", "2/5", "--format", "json") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["summary"]["len"] == 2
    assert report["metadata"]["param.x"] == "2/5"


def test_metadata_lines_are_sorted(capsys):
    assert run("cfe", "5/8") == 0
    trailer = [line for line in capsys.readouterr().out.splitlines() if line.startswith("# ")]
    assert trailer == sorted(trailer)


@pytest.mark.parametrize("value", ["abc", "7/3", "0"])
def test_bad_rational_exits_1(value, capsys):
    assert run("cfe", value) == 1
    assert "Error" in capsys.readouterr().err


def test_unknown_flag_exits_1():
    assert run("cfe", "3/7", "--bogus") == 1


def test_no_command_exits_1():
    assert run() == 1


def test_invariant_violation_exits_2(capsys):
    assert run("always-inconsistent") == 2
    assert "the books do not balance" in capsys.readouterr().err


def test_max_modulus_from_pyproject(project_dir):
    (project_dir / "pyproject.toml").write_text(
        '[tool.orbitlab]\nmodules = ["experiments"]\nmax_modulus = 10\n'
    )
    assert run("mirror", "--m", "12") == 1
    assert run("mirror", "--m", "7") == 0


def test_invalid_settings_exit_1(project_dir):
    (project_dir / "pyproject.toml").write_text("[tool.orbitlab]\nmax_modulus = -4\n")
    assert run("cfe", "3/7") == 1


def test_sweep_writes_output_and_removes_checkpoint(project_dir):
    output = project_dir / "out" / "mirror.csv"
    assert run("mirror", "--m", "5", "7", "--output", str(output)) == 0
    text = output.read_text()
    assert "# result.sign=1" in text
    assert "# result.all_time_reflections=true" in text
    assert not partial_path(output).exists()


@pytest.mark.parametrize(
    "argv",
    [
        ("orbit-measure", "--m", "1"),
        ("mirror", "--m", "5", "1"),
        ("mirror", "--m", "5", "2000000"),
    ],
)
def test_failed_sweep_leaves_no_files(project_dir, argv):
    output = project_dir / "sweep.csv"
    assert run(*argv, "--output", str(output)) == 1
    assert not output.exists()
    assert not partial_path(output).exists()


def test_resume_reuses_finished_values(project_dir):
    output = project_dir / "mirror.csv"
    fingerprint = json.dumps(
        {"experiment": "mirror", "params": {"m": [5, 7]}}, sort_keys=True
    )
    checkpoint = Checkpoint(output, fingerprint)
    checkpoint.record(
        5,
        ExperimentTable(
            columns=list(MirrorRow.model_fields),
            rows=[[5, 1, 1, 1, True]],
            summary={"residue.5": 1, "cusp_return.5": True},
        ),
    )
    assert run("mirror", "--m", "5", "7", "--output", str(output), "--resume") == 0
    rows = [line for line in output.read_text().splitlines() if not line.startswith("#")]
    assert sum(1 for line in rows if line.startswith("5,")) == 1
    assert sum(1 for line in rows if line.startswith("7,")) == 6


def test_resume_rejects_other_parameters(project_dir):
    output = project_dir / "mirror.csv"
    Checkpoint(output, json.dumps({"experiment": "mirror", "params": {"m": [11]}}))
    assert run("mirror", "--m", "5", "--output", str(output), "--resume") == 1


COPRIME = ("coprime", "--m", "30", "--intervals", "5")


def test_seeded_runs_are_byte_identical(project_dir):
    first, second = project_dir / "a.csv", project_dir / "b.csv"
    for output in (first, second):
        assert run(*COPRIME, "--seed", "3", "--output", str(output)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_seed_changes_the_sample(project_dir):
    first, second = project_dir / "a.csv", project_dir / "b.csv"
    assert run(*COPRIME, "--seed", "3", "--output", str(first)) == 0
    assert run(*COPRIME, "--seed", "4", "--output", str(second)) == 0
    assert first.read_bytes() != second.read_bytes()


def test_run_with_json_input(capsys):
    assert run("run", "--experiment", "cfe", "--input", '{"x": "2/5"}') == 0
    result = json.loads(capsys.readouterr().out)
    assert result["summary"]["word"] == "[0;2,2]"


def test_run_unknown_experiment():
    assert run("run", "--experiment", "nope") == 1


def test_config_dump(capsys):
    assert run("config", "dump") == 0
    dump = json.loads(capsys.readouterr().out)
    assert "cfe" in dump["experiments"]
    assert dump["experiments"]["coprime"]["sweep"]
    assert dump["experiments"]["coprime"]["stochastic"]
    assert dump["settings"]["max_modulus"] == 1_000_000


def test_check_without_pyproject(capsys):
    assert run("check") == 1
    assert "[FAIL] pyproject.toml exists" in capsys.readouterr().out


def test_check_with_pyproject(project_dir, capsys):
    (project_dir / "pyproject.toml").write_text(
        '[build-system]\nrequires = ["hatchling"]\n\n[tool.orbitlab]\nmodules = ["experiments"]\n'
    )
    assert run("check") == 0
    assert "Can import 'experiments'" in capsys.readouterr().out
