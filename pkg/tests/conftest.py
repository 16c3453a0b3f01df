"""Per-criterion PASS/FAIL lines at the end of the run."""
from collections import OrderedDict

_RESULTS: "OrderedDict[int, dict]" = OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", (int(m.args[0]), str(m.args[1]))))


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key != "criterion":
            continue
        n, title = value
        entry = _RESULTS.setdefault(n, {"title": title, "ok": True, "ran": False})
        if report.when == "call":
            entry["ran"] = True
        if report.failed:
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        e = _RESULTS[n]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"{status} criterion {n:2d}: {e['title']}")
