import pytest

from signclust.config import ENV_PREFIX, RunConfig
from signclust.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ('SIGMA', 'K', 'SEED', 'SIGMA_GRID', 'THRESH'):
        monkeypatch.delenv(ENV_PREFIX + name, raising=False)


def test_defaults():
    cfg = RunConfig.resolve()
    assert cfg.sigma == 0.2 and cfg.thresh == 0.04 and cfg.K is None
    assert cfg.restarts == 8 and cfg.high_cut == 8.0


def test_precedence(tmp_path, monkeypatch):
    config = tmp_path / "run.env"
    config.write_text("sigma=0.5\nthresh=0.1\n")
    monkeypatch.setenv(ENV_PREFIX + "SIGMA", "0.9")
    monkeypatch.setenv(ENV_PREFIX + "SEED", "7")
    monkeypatch.setenv(ENV_PREFIX + "THRESH", "0.3")

    cfg = RunConfig.resolve({'sigma': 1.5, 'thresh': None}, str(config))
    assert cfg.sigma == 1.5
    assert cfg.thresh == 0.1
    assert cfg.seed == 7

    cfg = RunConfig.resolve({}, str(config))
    assert cfg.sigma == 0.5


def test_environment_values_are_coerced(monkeypatch):
    monkeypatch.setenv(ENV_PREFIX + "K", "4")
    monkeypatch.setenv(ENV_PREFIX + "SIGMA_GRID", "0.1, 0.2,0.4")
    cfg = RunConfig.resolve()
    assert cfg.K == 4
    assert cfg.sigma_grid == [0.1, 0.2, 0.4]


def test_unknown_config_key(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("sigmaa=0.5\n")
    with pytest.raises(ConfigError):
        RunConfig.resolve(config_file=str(config))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.resolve(config_file=str(tmp_path / "absent.env"))


def test_bad_value(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("K=three\n")
    with pytest.raises(ConfigError):
        RunConfig.resolve(config_file=str(config))


@pytest.mark.parametrize("values", [{'sigma': 0.0}, {'thresh': -1.0}, {'high_cut': 10.0},
                                    {'restarts': 0}, {'jobs': -2}, {'K': 0}])
def test_validate(values):
    with pytest.raises(ConfigError):
        RunConfig.resolve(values).validate()


def test_grid_spec_falls_back_to_scalars():
    cfg = RunConfig.resolve({'K': 3, 'sigma_grid': [0.1, 0.2]})
    grid = cfg.grid_spec()
    assert grid.sigma == [0.1, 0.2]
    assert grid.K == [3] and grid.thresh == [0.04]
    assert grid.cell_count() == 2


def test_grid_spec_needs_k():
    with pytest.raises(ConfigError):
        RunConfig.resolve().grid_spec()


def test_require():
    cfg = RunConfig.resolve({'embeddings': 'x.txt'})
    cfg.require('embeddings')
    with pytest.raises(ConfigError) as info:
        cfg.require('embeddings', 'thesaurus', 'K')
    assert "thesaurus, K" in str(info.value)


def test_effective_jobs():
    assert RunConfig.resolve({'jobs': 3}).effective_jobs() == 3
    assert RunConfig.resolve().effective_jobs() >= 1


def test_planted_config_defaults_k():
    assert RunConfig.resolve().planted_config().K == 5


def test_dotenv_in_working_directory(tmp_path, monkeypatch):
    # registers an undo so the loaded value is removed afterwards
    monkeypatch.setenv(ENV_PREFIX + "RESTARTS", "1")
    monkeypatch.delenv(ENV_PREFIX + "RESTARTS")
    (tmp_path / ".env").write_text(f"{ENV_PREFIX}RESTARTS=3\n")
    monkeypatch.chdir(tmp_path)
    assert RunConfig.resolve().restarts == 3


def test_config_file_not_utf8(tmp_path):
    config = tmp_path / "run.env"
    config.write_bytes(b"sigma=\xff\xfe\n")
    with pytest.raises(ConfigError):
        RunConfig.resolve(config_file=str(config))
