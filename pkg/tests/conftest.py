from collections import OrderedDict

ACCEPTANCE = OrderedDict()


def record(criterion, ok, detail):
    """Collect one part of an acceptance criterion; a criterion passes when all its parts do."""
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[criterion]
        ok = all(p[0] for p in parts)
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | "
                                    + "; ".join(p[1] for p in parts))
