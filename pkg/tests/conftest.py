from hypothesis import strategies as st

from cspsym.graph import Network, Permutation


@st.composite
def networks(draw, min_size=1, max_size=6):
    n = draw(st.integers(min_size, max_size))
    vs = [str(i) for i in range(1, n + 1)]
    pairs = [(a, b) for a in vs for b in vs if a != b]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Network(vs, edges)


@st.composite
def permutations_of(draw, domain):
    domain = list(domain)
    img = draw(st.permutations(domain))
    return Permutation(dict(zip(domain, img)))


@st.composite
def perms(draw, max_size=7):
    n = draw(st.integers(1, max_size))
    return draw(permutations_of([f"v{i}" for i in range(n)]))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
