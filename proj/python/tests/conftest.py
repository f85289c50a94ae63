import json
import os
import pathlib
import shutil
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("GMTLAB_CLI") or shutil.which("gmtlab") or str(ROOT / "build" / "gmtlab")
    path = str(pathlib.Path(path).resolve())
    if not pathlib.Path(path).exists():
        pytest.skip("gmtlab CLI not built")

    def run(*args, expect=0, cwd=None):
        proc = subprocess.run([path, *map(str, args)], capture_output=True, text=True, cwd=cwd)
        assert proc.returncode == expect, proc.stdout + proc.stderr
        return proc

    return run


@pytest.fixture(scope="session")
def validator():
    jsonschema = pytest.importorskip("jsonschema")
    from referencing import Registry, Resource

    schemas = pathlib.Path(os.environ.get("GMTLAB_SCHEMAS", ROOT / "schemas"))
    docs = {p.name: json.loads(p.read_text()) for p in schemas.glob("*.schema.json")}
    registry = Registry().with_resources((d["$id"], Resource.from_contents(d)) for d in docs.values())

    def validate(report, schema="report.schema.json"):
        jsonschema.Draft202012Validator(docs[schema], registry=registry).validate(report)

    return validate
