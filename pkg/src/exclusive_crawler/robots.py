"""A small robots.txt subset: ``User-agent`` groups and ``Disallow`` prefixes.

``Allow``, ``Crawl-delay``, ``Sitemap`` and wildcard paths are not
supported; unknown fields are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .urls import NormalizedUrl


@dataclass
class RobotsGroup:
    agent_pattern: str
    disallow_prefixes: list[str] = field(default_factory=list)


@dataclass
class RobotsRules:
    groups: list[RobotsGroup] = field(default_factory=list)

    def group_for(self, user_agent: str) -> Optional[RobotsGroup]:
        """The group that governs ``user_agent``, merged over repeated entries.

        An exact (case-insensitive) match on the agent's product token wins
        over ``*``.
        """
        token = agent_token(user_agent)
        exact = [g for g in self.groups if g.agent_pattern.lower() == token]
        chosen = exact or [g for g in self.groups if g.agent_pattern == "*"]
        if not chosen:
            return None
        prefixes: list[str] = []
        for g in chosen:
            prefixes.extend(p for p in g.disallow_prefixes if p not in prefixes)
        return RobotsGroup(chosen[0].agent_pattern, prefixes)


def agent_token(user_agent: str) -> str:
    """``"ExclusiveCrawler/1.0 (+info)"`` -> ``"exclusivecrawler"``."""
    return user_agent.strip().split("/", 1)[0].split(" ", 1)[0].lower()


def parse_robots(text: str) -> RobotsRules:
    """Parse robots.txt text.

    Consecutive ``User-agent`` lines share the rules that follow them; a
    ``User-agent`` line after a rule starts a new record.
    """
    rules = RobotsRules()
    current: list[RobotsGroup] = []
    seen_rule = False
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if ":" not in line:
            continue
        name, value = line.split(":", 1)
        name = name.strip().lower()
        value = value.strip()
        if name == "user-agent":
            if seen_rule:
                current = []
                seen_rule = False
            group = RobotsGroup(value)
            current.append(group)
            rules.groups.append(group)
        elif name == "disallow":
            seen_rule = True
            # rules before any User-agent line have no owner
            for group in current:
                if value:
                    group.disallow_prefixes.append(value)
        else:
            seen_rule = seen_rule or bool(current)
    return rules


def check_robots(rules: Optional[RobotsRules], url: NormalizedUrl, user_agent: str) -> bool:
    if rules is None:
        return True
    group = rules.group_for(user_agent)
    if group is None:
        return True
    return not any(url.path.startswith(prefix) for prefix in group.disallow_prefixes)
