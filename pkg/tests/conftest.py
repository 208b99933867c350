import pytest

from oam_hopsim.channel import NoiseProfile, UcaGeometry, channel_gains

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prev = _criteria.get(number, (None, text))[0]
        status = "FAIL" if failed or prev == "FAIL" else "PASS"
        _criteria[number] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, text = _criteria[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {text}")


def make_geometry(n_t=8, **kw):
    params = dict(r1=0.05, r2=0.05, d=3.0, wavelength=299792458.0 / 60e9)
    params.update(kw)
    return UcaGeometry(n_t=n_t, **params)


@pytest.fixture
def geom8():
    return make_geometry(8)


@pytest.fixture
def gains4():
    return channel_gains(make_geometry(4), normalize=True)


@pytest.fixture
def noise4():
    return NoiseProfile.from_snr_db(4, 0.0, p0=1.0)
