import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def reference_source() -> str:
    return (FIXTURES / "rainfall_reference.py").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_sources() -> dict[str, str]:
    """Every passing rainfall solution shipped with the repo, by file name."""
    sources = {"rainfall_reference.py": (FIXTURES / "rainfall_reference.py").read_text(encoding="utf-8")}
    for path in sorted((FIXTURES / "corpus").glob("*.py")):
        sources[path.name] = path.read_text(encoding="utf-8")
    return sources


@pytest.fixture(scope="session")
def mutant_sources() -> dict[str, str]:
    return {
        path.stem: path.read_text(encoding="utf-8")
        for path in sorted((FIXTURES / "mutants").glob("*.py"))
    }


@pytest.fixture(scope="session")
def rainfall_spec():
    from qlc.assessment import load_exercise_spec

    return load_exercise_spec(REPO_ROOT / "exercises" / "rainfall.json")
