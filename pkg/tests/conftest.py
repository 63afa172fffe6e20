import json

import pytest

from gpudvfs import DeviceProfile, EdgeProfile, NetworkProfile, load_builtin
from gpudvfs.models import PowerLawModel
from gpudvfs.profiles import BlockProfile, MB

TABLE_I = [
    (0.7111, 0.750, 0.0865), (0.0339, 0.745, 0.0295), (0.2627, 1.372, 1.601), (0.0239, 0.904, 0.0018),
    (0.7843, 0.896, 0.1163), (1.158, 1.113, 0.8472), (0.0553, 0.905, 0.0065), (0.8595, 1.432, 3.843),
]
TABLE_II = [
    (1.009, 0.669, 0.2721), (0.7454, 1.614, 7.168), (2.196, 1.402, 8.44), (1.153, 1.529, 7.743),
    (5.288, 1.374, 17.92), (4.533, 1.371, 15.03), (4.141, 1.407, 16.14), (5.544, 1.325, 14.84),
    (5.85, 1.027, 0.8289),
]
RESNET_FEATURES_MB = [3.06, 0.77, 1.53, 0.38, 0.19, 0.19, 0.19, 0.10, 3.8e-5]


@pytest.fixture
def alexnet():
    return load_builtin("alexnet-xavier-nx")


@pytest.fixture
def resnet():
    return load_builtin("resnet152-xavier-nx")


def toy_parts(tx_power=1.0, edge_ms=0.1):
    net = NetworkProfile(
        "toy",
        (BlockProfile("b1", PowerLawModel(1, 1, 0), output_bytes=0.1 * MB),
         BlockProfile("b2", PowerLawModel(1, 1, 0), output_bytes=0.0)),
        input_bytes=1 * MB,
    )
    dev = DeviceProfile("toy-dev", (1.0,), 1.0, tx_power=tx_power)
    edge = EdgeProfile("toy-edge", (edge_ms, edge_ms))
    return net, dev, edge


@pytest.fixture
def toy():
    return toy_parts()


TOY_PROFILE = {
    "device": {"name": "toy-dev", "freq_scale_ghz": [1.0], "kappa_w_per_ghz3": 1.0, "tx_power_w": 1.0},
    "network": {
        "name": "toy",
        "input_bytes": 1000000,
        "blocks": [
            {"name": "b1", "output_bytes": 100000, "model": {"a": 1, "b": 1, "c": 0}},
            {"name": "b2", "output_bytes": 0, "model": {"a": 1, "b": 1, "c": 0}},
        ],
    },
    "edge": {"name": "toy-edge", "block_latency_ms": [0.1, 0.1]},
}


@pytest.fixture
def toy_profile_path(tmp_path):
    p = tmp_path / "toy.json"
    p.write_text(json.dumps(TOY_PROFILE))
    return p


@pytest.fixture
def alexnet_two_freq_path(tmp_path):
    from gpudvfs.profiles import dump_profile, Profile

    prof = load_builtin("alexnet-xavier-nx")
    dev = DeviceProfile(prof.device.name, (0.5, 1.0), prof.device.kappa)
    p = tmp_path / "alexnet2.json"
    dump_profile(Profile(dev, prof.network), p)
    return p


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        verdict = "PASS" if _criteria[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name[len('test_'):]}")
