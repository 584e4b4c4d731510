"""Shared states and oracle values for the test suite."""
import pytest

GOLDEN = "1111212"
LONG_M40 = "1211122111121211211111212121221222121121"

# short hand-picked states plus the long printed one; used wherever a test
# quantifies over "every regression state"
REGRESSION_PSI = [
    GOLDEN, "12", "112", "1121", "12122", "1112", "11221", "121122",
    "11121222", "1212112", "2111212", "111222112", LONG_M40,
]

# j = 1 golden charge: X = (1/7 pi) num(mu) / den(mu), coefficients by descending even power
GOLDEN_J1_NUM = [10, 25, 34, 26, 11, 2]
GOLDEN_J1_DEN = [7, 21, 35, 35, 21, 7, 1]

# j = 2 golden charge: X = (12/7 pi) num / den
GOLDEN_J2_NUM = [146800640, 1871708160, 12689080320, 57839910912, 189502291968, 455242522624,
                 804831242240, 1039513800192, 958560474048, 599204434384, 227327105092,
                 39573895547]
GOLDEN_J2_DEN = [654311424, 9479127040, 71485620224, 360711192576, 1319572668416, 3603429982208,
                 7414633218048, 11483489935360, 13232857409792, 11037736083712, 6304816157920,
                 2204519902544, 356177462887]


@pytest.fixture(params=REGRESSION_PSI[:-1])
def short_psi(request):
    return request.param


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
