import pytest

import cslscert as cc


@pytest.fixture(scope="session")
def example_csls():
    return cc.parse_system_config(cc.bundled_example_path())


@pytest.fixture(scope="session")
def whitebox_result(example_csls):
    # Grid-certified (gamma, forms) of the bundled system; computed once
    # per session because the dense-grid pass costs a couple of seconds.
    return cc.whitebox_gamma(example_csls)


@pytest.fixture(scope="session")
def gamma_cert(whitebox_result):
    return whitebox_result[0]
