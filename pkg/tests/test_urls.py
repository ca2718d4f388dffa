import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exclusive_crawler.urls import (
    Frontier,
    HostScope,
    MalformedUrl,
    NormalizedUrl,
    Scope,
    UnsupportedScheme,
    classify,
    normalize,
    remove_dot_segments,
)


def test_normalize_case_port_dots_fragment():
    assert normalize("HTTP://Example.COM:80/a/../b#frag").render() == "http://example.com/b"


def test_normalize_relative():
    base = normalize("http://example.com/dir/page1.html")
    assert normalize("page2.html", base).render() == "http://example.com/dir/page2.html"


def test_normalize_rejects_non_http():
    with pytest.raises(UnsupportedScheme):
        normalize("mailto:a@b.c")
    with pytest.raises(UnsupportedScheme):
        normalize("javascript:void(0)", normalize("http://h/"))


@pytest.mark.parametrize("raw", ["", "   ", "/relative/only", "http://", "http://h:99999/", "http:///x"])
def test_normalize_malformed(raw):
    with pytest.raises(MalformedUrl):
        normalize(raw)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("https://H.example:443", "https://h.example/"),
        ("http://h:8080/x", "http://h:8080/x"),
        ("http://h/%7efil/", "http://h/~fil/"),
        ("http://h/a%2fb", "http://h/a%2Fb"),
        ("http://h/My File.htm", "http://h/My%20File.htm"),
        ("http://h/100%", "http://h/100%25"),
        ("http://h/./a/./b/../c", "http://h/a/c"),
        ("http://h/x?b=2&a=1#top", "http://h/x?b=2&a=1"),
        ("http://h/café", "http://h/caf%C3%A9"),
        ("http://[::1]:8080/", "http://[::1]:8080/"),
    ],
)
def test_normalize_table(raw, expected):
    assert normalize(raw).render() == expected


def test_equivalent_forms_collapse():
    forms = ["http://EXAMPLE.com/p", "http://example.com:80/p", "http://example.com/p#x", "HTTP://example.com/p"]
    assert len({normalize(f) for f in forms}) == 1


def test_query_is_identity_significant():
    assert normalize("http://h/x?a=1") != normalize("http://h/x?a=2")


@pytest.mark.parametrize(
    "path, expected",
    [
        ("/a/b/c/./../../g", "/a/g"),  # RFC 3986 5.2.4 examples
        ("mid/content=5/../6", "mid/6"),
        ("/..", "/"),
        ("/a/..", "/"),
    ],
)
def test_remove_dot_segments(path, expected):
    assert remove_dot_segments(path) == expected


_segment = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="/?#"), max_size=8)


@st.composite
def raw_urls(draw):
    scheme = draw(st.sampled_from(["http", "HTTP", "https", "Https"]))
    host = draw(st.from_regex(r"[a-zA-Z][a-zA-Z0-9-]{0,10}(\.[a-zA-Z]{2,5}){0,2}", fullmatch=True))
    port = draw(st.sampled_from(["", ":80", ":443", ":8080"]))
    segments = draw(st.lists(st.one_of(_segment, st.sampled_from([".", "..", "%7e", "%2F", "%41"])), max_size=5))
    query = draw(st.one_of(st.just(""), st.from_regex(r"\?[a-z0-9=&]{1,10}", fullmatch=True)))
    fragment = draw(st.one_of(st.just(""), st.just("#frag")))
    return f"{scheme}://{host}{port}/{'/'.join(segments)}{query}{fragment}"


@settings(max_examples=300)
@given(raw_urls())
def test_normalize_is_fixed_point(raw):
    url = normalize(raw)
    assert "#" not in url.render()
    assert normalize(url.render()) == url
    assert normalize(normalize(url.render()).render()) == url


def test_classify():
    scope = HostScope("http", "example.com", 80)
    assert classify(normalize("http://example.com/x"), scope) is Scope.INTERNAL
    assert classify(normalize("http://other.com/x"), scope) is Scope.EXTERNAL
    assert classify(normalize("https://example.com/x"), scope) is Scope.EXTERNAL
    assert classify(normalize("http://www.example.com/x"), scope) is Scope.EXTERNAL
    assert classify(normalize("http://example.com:8080/x"), scope) is Scope.EXTERNAL


def test_scope_of_seed():
    assert HostScope.of(normalize("http://Example.com/a")) == HostScope("http", "example.com", 80)


def _u(name):
    return normalize(f"http://h/{name}")


def test_enqueue_dedup():
    f = Frontier()
    assert f.enqueue(_u("a")) is True
    assert f.enqueue(_u("a")) is False
    assert len(f) == 1


def test_enqueue_100_distinct_then_duplicates():
    urls = [_u(f"p{i}") for i in range(100)]
    inputs = urls + urls
    f = Frontier()
    for u in inputs:
        f.enqueue(u)
    oracle = set(u.render() for u in inputs)
    assert len(f) == len(oracle) == 100
    assert f.visited == oracle


def test_dequeue_fifo():
    f = Frontier()
    assert f.dequeue() is None
    a, b = _u("a"), _u("b")
    for u in (a, b, a):
        f.enqueue(u)
    assert [f.dequeue(), f.dequeue(), f.dequeue()] == [a, b, None]
    # dequeue does not forget
    assert f.enqueue(a) is False


def test_mark_visited_blocks_enqueue():
    f = Frontier()
    assert f.mark_visited(_u("r")) is True
    assert f.enqueue(_u("r")) is False
    assert len(f) == 0


class _ReferenceFrontier:
    """List + set model used as an oracle."""

    def __init__(self):
        self.items = []
        self.seen = set()

    def enqueue(self, x):
        if x in self.seen:
            return False
        self.seen.add(x)
        self.items.append(x)
        return True

    def dequeue(self):
        return self.items.pop(0) if self.items else None


@given(st.lists(st.one_of(st.integers(0, 15).map(lambda i: ("enq", i)), st.just(("deq", None))), max_size=80))
def test_frontier_matches_reference_model(ops):
    f, ref = Frontier(), _ReferenceFrontier()
    dequeued = []
    accepted = 0
    for op, arg in ops:
        if op == "enq":
            got = f.enqueue(_u(str(arg)))
            assert got == ref.enqueue(_u(str(arg)).render())
            accepted += got
        else:
            got = f.dequeue()
            want = ref.dequeue()
            assert (got.render() if got else None) == want
            if got:
                dequeued.append(got)
    assert len(dequeued) == len(set(dequeued))
    assert len(f.visited) == accepted


def test_normalized_url_render_default_ports():
    assert NormalizedUrl("https", "h", 443, "/").render() == "https://h/"
    assert NormalizedUrl("http", "h", 443, "/").render() == "http://h:443/"
