import pytest

from exclusive_crawler.robots import RobotsGroup, RobotsRules, agent_token, check_robots, parse_robots
from exclusive_crawler.urls import normalize

UA = "ExClone/2.0"


def test_parse_single_group():
    rules = parse_robots("User-agent: *\nDisallow: /private/")
    assert rules.groups == [RobotsGroup("*", ["/private/"])]


def test_parse_shared_agents_and_comments():
    text = """
# comment line
User-agent: A
User-agent: B   # trailing comment
Disallow: /x
Disallow: /y

User-agent: *
Disallow:
Crawl-delay: 10
"""
    rules = parse_robots(text)
    assert [(g.agent_pattern, g.disallow_prefixes) for g in rules.groups] == [
        ("A", ["/x", "/y"]),
        ("B", ["/x", "/y"]),
        ("*", []),
    ]


def test_agent_after_rule_starts_new_group():
    rules = parse_robots("User-agent: A\nDisallow: /a\nUser-agent: B\nDisallow: /b\n")
    assert [(g.agent_pattern, g.disallow_prefixes) for g in rules.groups] == [("A", ["/a"]), ("B", ["/b"])]


def test_agent_token():
    assert agent_token("ExclusiveCrawler/1.0") == "exclusivecrawler"
    assert agent_token("  ExClone (+http://x)") == "exclone"


def _prefix_oracle(prefixes, path):
    return not any(path[: len(p)] == p for p in prefixes if p)


@pytest.mark.parametrize("path", ["/private/x", "/pub/x", "/private", "/privatex", "/"])
def test_check_star_group_against_oracle(path):
    rules = parse_robots("User-agent: *\nDisallow: /private/")
    assert check_robots(rules, normalize(f"http://h{path}"), UA) == _prefix_oracle(["/private/"], path)


def test_absent_rules_allow_everything():
    assert check_robots(None, normalize("http://h/anything"), UA) is True


def test_other_agent_does_not_bind_us():
    rules = parse_robots("User-agent: BadBot\nDisallow: /")
    assert rules.groups
    assert check_robots(rules, normalize("http://h/x"), "ExClone") is True
    assert check_robots(rules, normalize("http://h/x"), "badbot/3") is False


def test_exact_agent_beats_star():
    rules = parse_robots("User-agent: *\nDisallow: /\n\nUser-agent: exclone\nDisallow: /secret\n")
    assert check_robots(rules, normalize("http://h/open"), UA) is True
    assert check_robots(rules, normalize("http://h/secret/1"), UA) is False
    assert check_robots(rules, normalize("http://h/open"), "Other") is False


def test_empty_disallow_allows():
    rules = RobotsRules([RobotsGroup("*", [])])
    assert check_robots(rules, normalize("http://h/x"), UA) is True
    assert check_robots(parse_robots("User-agent: *\nDisallow:\n"), normalize("http://h/x"), UA) is True
