import numpy as np
import pytest

from ginedge import ensemble as en
from ginedge import geometry as ge
from ginedge import kernels as ke
from ginedge import montecarlo as mc


@pytest.fixture(scope="session")
def ginue_nu():
    return en.AtomMeasure(atoms=(0.0,), weights=(1.0,))


@pytest.fixture(scope="session")
def ginue_edge(ginue_nu):
    # single atom at 0, tau = 1: support is the unit disk, z0 = 1 regular
    return ge.classify_edge(ginue_nu, 1.0, 1.0)


@pytest.fixture(scope="session")
def ginue_model(ginue_nu, ginue_edge):
    return ke.KernelModel(index=0, edge=ginue_edge, tau=1.0)


@pytest.fixture(scope="session")
def small_run(ginue_nu, ginue_edge):
    """Shared small experiment: N = 128, 300 trials, window 3."""
    spec = en.make_spec(ginue_nu, 1.0, 128, R0=2)
    cfg = mc.ExperimentConfig(spec=spec, edge=ginue_edge, trials=300, seed=1234)
    samples = mc.run_edge_experiment(cfg)
    return spec, cfg, samples
