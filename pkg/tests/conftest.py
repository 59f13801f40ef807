import pathlib

import pytest

from skiql.schema_io import load_schema

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
AGGREGATE_PATH = FIXTURES / "userprofile-aggregate.uschema.json"
GRAPH_PATH = FIXTURES / "userprofile-graph.uschema.json"
SAMPLES_DIR = FIXTURES / "samples"
EXTRACT_CONFIG = FIXTURES / "extract-config.json"


@pytest.fixture(scope="session")
def aggregate_model():
    return load_schema(AGGREGATE_PATH)


@pytest.fixture(scope="session")
def graph_model():
    return load_schema(GRAPH_PATH)
