import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


def _dir(env, fallback):
    return pathlib.Path(os.environ.get(env, ROOT / fallback))


@pytest.fixture(scope="session")
def data_dir():
    return _dir("CCSV_DATA_DIR", "data")


@pytest.fixture(scope="session")
def fixture_text():
    return (_dir("CCSV_FIXTURE_DIR", "tests/fixtures") / "gps-bus-checkpoint-1.ccsv").read_text()


@pytest.fixture(scope="session")
def api_schema():
    import json

    return json.loads((_dir("CCSV_DOCS_DIR", "docs") / "api-schema.json").read_text())


@pytest.fixture
def config_path(tmp_path, data_dir):
    files = ", ".join(f'"{data_dir / f}"' for f in ("hasneto-sc-schema.ttl", "pmf-domain.ttl", "fortaleza-network.ttl"))
    path = tmp_path / "ccsv.toml"
    path.write_text(
        f'[index]\nsnapshot = "{tmp_path / "index.snap"}"\n'
        f'[[knowledge_base]]\nname = "pmf-kb"\nurls = ["http..."]\nfiles = [{files}]\n'
    )
    return path
