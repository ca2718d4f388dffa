import csv
import socket
import subprocess
import sys

import pytest

from exclusive_crawler.cli import main
from exclusive_crawler.store import read_records


def test_crawl_writes_both_formats(make_site, tmp_path, capsys):
    site = make_site(pages=8, links_per_page=2, seed=3)
    out = tmp_path / "out" / "crawl"
    code = main(["crawl", "--seed-url", site.seed_url, "--out", str(out), "--format", "both",
                 "--truncate", "1/2", "--user-agent", "ExClone/1.0"])
    assert code == 0
    records = read_records(out.with_suffix(".jsonl"))
    assert {r.url for r in records} == site.expected_urls()
    rows = list(csv.reader(out.with_suffix(".csv").open(encoding="utf-8")))
    assert rows[0] == ["ID", "Page Number", "Title", "Description", "Keyword", "Page Component", "Images", "Links to"]
    assert len(rows) == 9
    assert {e.user_agent for e in site.main.log.entries} == {"ExClone/1.0"}
    assert "stored 8 pages" in capsys.readouterr().out


def test_crawl_managed_normal(make_site, tmp_path):
    site = make_site(pages=10, links_per_page=2, external_fraction=0.2, seed=3, robots_body="User-agent: *\nDisallow:\n")
    out = tmp_path / "c"
    code = main(["crawl", "--seed-url", site.seed_url, "--mode", "normal", "--workers", "4",
                 "--external-budget", "2", "--delay-ms", "1", "--out", str(out)])
    assert code == 0
    assert len(read_records(out.with_suffix(".jsonl"))) == 12


def test_seed_unreachable_exit_1(tmp_path, capsys):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    code = main(["crawl", "--seed-url", f"http://127.0.0.1:{port}/", "--timeout-ms", "500", "--out", str(tmp_path / "x")])
    assert code == 1
    assert "unreachable" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["crawl"],
        ["crawl", "--seed-url", "http://h/", "--workers", "0"],
        ["crawl", "--seed-url", "http://h/", "--mode", "fast"],
        ["crawl", "--seed-url", "http://h/", "--truncate", "abc"],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


@pytest.mark.parametrize("argv", [
    ["crawl", "--seed-url", "ftp://h/"],
    ["crawl", "--seed-url", "http://h/", "--truncate", "3/2"],
])
def test_bad_values_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "o")]) == 2


def test_fixture_gen(tmp_path):
    assert main(["fixture", "gen", "--pages", "4", "--out", str(tmp_path / "site"), "--robots", ""]) == 0
    assert sorted(p.name for p in (tmp_path / "site").glob("p*.html")) == ["p1.html", "p2.html", "p3.html", "p4.html"]
    assert (tmp_path / "site" / "manifest.json").is_file()


def test_bench_writes_comparison(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--pages", "6", "--latency-ms", "0", "--workers", "3", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "mode,pages,wall_ms,per_page_ms,requests"
    assert [line.split(",")[0] for line in lines[1:]] == ["exclusive", "normal"]
    assert lines[1].split(",")[1] == "6"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "exclusive_crawler", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "crawl" in proc.stdout
