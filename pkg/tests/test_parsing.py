import pytest

from vivada.errors import ParseError
from vivada.models import Polarity
from vivada.parsing import parse_seed_list
from vivada.parsing.visitors import SeedListVisitor, article_url, is_article

WIKITEXT = """\
{{Short description|List article}}
Intro text with a [[Link in prose]].

== Politics and economics ==
* [[Abortion]]
* [[Gun control|Gun politics]] and [[Capital punishment]]
=== Sub topic ===
* [[Abortion]]
*[[File:Picture.png|thumb]]

==History==
# [[World War II#Causes|causes]]
* [[:Category:Disputes]]
* plain text without links
"""


def test_article_url():
    assert article_url("gun control") == "https://en.wikipedia.org/wiki/Gun_control"
    assert article_url("Abortion#History", "http://localhost:8000/") == "http://localhost:8000/wiki/Abortion"


def test_is_article():
    assert is_article("Abortion")
    assert not is_article("File:Picture.png")
    assert not is_article(":Category:Disputes")
    assert not is_article("#Section")
    assert is_article("Star Wars: Episode I")


def test_parse_seed_list_topics_and_dedup():
    seeds = parse_seed_list(WIKITEXT)
    assert [s.url.rsplit("/", 1)[-1] for s in seeds] == [
        "Abortion",
        "Gun_control",
        "Capital_punishment",
        "World_War_II",
    ]
    assert [s.topic for s in seeds] == [
        "Politics and economics",
        "Politics and economics",
        "Politics and economics",
        "History",
    ]
    assert all(s.polarity is Polarity.CONTROVERSIAL for s in seeds)


def test_links_outside_bullets_are_ignored():
    assert parse_seed_list("See [[Abortion]] here.\n") == []


def test_windows_line_endings():
    seeds = parse_seed_list("== A ==\r\n* [[X]]\r\n")
    assert [(s.url, s.topic) for s in seeds] == [("https://en.wikipedia.org/wiki/X", "A")]


def test_seed_list_from_file(tmp_path):
    path = tmp_path / "list.wiki"
    path.write_text("* [[Evolution]]", encoding="utf-8")
    seeds = SeedListVisitor.from_file(str(path)).parse()
    assert len(seeds) == 1
    assert seeds[0].topic is None


def test_unterminated_link_degrades_to_text():
    seeds = parse_seed_list("* [[Broken\n* [[Fine]]\n")
    assert [s.url.rsplit("/", 1)[-1] for s in seeds] == ["Fine"]


def test_parse_error_carries_path(tmp_path, monkeypatch):
    path = tmp_path / "list.wiki"
    path.write_text("* [[X]]\n", encoding="utf-8")
    visitor = SeedListVisitor.from_file(str(path))
    monkeypatch.setattr(visitor, "source", "\0")
    with pytest.raises(ParseError) as e:
        visitor.parse()
    assert e.value.path == str(path)
