import pytest

from relation_anomaly.analyze import load_config
from relation_anomaly.embed import load_embeddings
from relation_anomaly.graphdata import gen_synthetic, load_synthetic_config

from .fixtures import SYNTHETIC_CONFIG, SYNTHETIC_SPEC, TOY_EMBEDDINGS


@pytest.fixture(scope="session")
def toy_table():
    return load_embeddings(TOY_EMBEDDINGS)


@pytest.fixture(scope="session")
def dining_spec():
    return load_synthetic_config(SYNTHETIC_SPEC)


@pytest.fixture(scope="session")
def small_synthetic(dining_spec):
    """20 normal + 6 anomalous images with 8 triplets each."""
    spec = dining_spec.model_copy(update={"n_normal": 20, "n_anomalous": 6, "triplets_per_image": 8})
    return gen_synthetic(spec, seed=0)


@pytest.fixture
def fast_config(tmp_path):
    """The bundled synthetic config cut down to a few epochs and two seeds."""
    return load_config(
        SYNTHETIC_CONFIG,
        ae_epochs=5,
        flow_epochs=5,
        flow_hidden=16,
        seeds=[0, 1],
        output_dir=str(tmp_path / "results"),
    )
