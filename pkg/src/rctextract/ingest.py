"""PubMed retrieval: search strategies, E-utilities transport, record parsing.

Network access goes through a transport object with a single ``get``
method, so everything here runs offline against recorded responses
(:class:`FixtureTransport`). Fixture directories hold one XML file per
request, named ``<endpoint>_<retstart>.xml`` (e.g. ``esearch_0.xml``,
``efetch_0.xml``).
"""
from __future__ import annotations

import enum
import logging
import os
import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .corpus import Abstract, make_abstract

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/"
ENV_ENDPOINT = "RCTEXTRACT_ENTREZ_URL"
ENV_API_KEY = "RCTEXTRACT_API_KEY"


class IngestError(RuntimeError):
    pass


class TransportError(IngestError):
    pass


class ParseError(IngestError):
    pass


class RateLimited(TransportError):
    def __init__(self, message: str, retry_after: Optional[float] = None):
        super().__init__(message)
        self.retry_after = retry_after


class EmptyBody(ValueError):
    pass


class SearchStrategy(str, enum.Enum):
    GLAUCOMA = "glaucoma"
    PRESCRIPTION_DRUGS = "prescription-drugs"
    SURGICAL_INTERVENTIONS = "surgical-interventions"


# Printed query strings, kept character for character (including the
# unbalanced quote and parenthesis in the first two).
_QUERIES = {
    SearchStrategy.GLAUCOMA: (
        "(clinical trial''[Publication Type]) AND (glaucoma[Title/Abstract]) AND "
        "(randomized OR randomised OR double-masked[Title/Abstract]) NOT (''protocol'' "
        "OR ''non-randomized''[Title/Abstract])"
    ),
    SearchStrategy.PRESCRIPTION_DRUGS: (
        "(mitomycin[Title] OR brimonidine[Title] OR brinzolamide[Title] OR dorzolamide[Title] "
        "OR carteolol[Title] OR betaxolol[Title] OR fluorouracil[Title] OR latanoprost[Title] "
        "OR bimatoprost[Title] OR travoprost[Title] OR timolol[Title] AND (randomized[Title] "
        "OR randomised[Title]) AND (''glaucoma''[MeSH Terms] OR ''glaucoma''[All Fields])"
    ),
    SearchStrategy.SURGICAL_INTERVENTIONS: (
        "(randomized[Title] OR randomised[Title]) AND (trabeculectomy[Title] OR "
        "phacoemulsification[Title] OR trabeculoplasty[Title] OR phacotrabeculectomy[Title])"
    ),
}


def build_query(strategy) -> str:
    """The query text of a search strategy, as printed."""
    return _QUERIES[SearchStrategy(strategy)]


def entrez_query(query: str) -> str:
    """Make a printed query acceptable to the search service.

    Doubled single quotes become double quotes; a dangling quote before a
    field tag gets its opening partner; unbalanced parentheses are closed
    before the first top-level ``AND``.
    """
    q = query.replace("''", '"')
    q = re.sub(r'\(([^"()\[\]]+)"\[', r'("\1"[', q)
    depth, out, closed = 0, [], False
    i = 0
    while i < len(q):
        c = q[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        if not closed and depth > 0 and q.startswith(" AND (", i) and q.count("(") > q.count(")"):
            out.append(")" * depth)
            depth = 0
            closed = True
        out.append(c)
        i += 1
    return "".join(out)


@dataclass(frozen=True)
class RawRecord:
    id: str
    title: str
    labeled_sections: Tuple[Tuple[str, str], ...]
    publication_types: FrozenSet[str] = frozenset()


# ---------------------------------------------------------------------------
# transports


class EntrezTransport:
    """HTTP transport for the E-utilities endpoints.

    Parameters
    ----------
    base_url : endpoint root; ``$RCTEXTRACT_ENTREZ_URL`` or the public service
    api_key : optional key; ``$RCTEXTRACT_API_KEY`` when None
    page_size : ids per search/fetch request
    delay : seconds to wait between requests
    timeout : per-request timeout in seconds
    """

    def __init__(self, base_url: Optional[str] = None, api_key: Optional[str] = None,
                 page_size: int = 100, delay: float = 0.34, timeout: float = 30.0):
        import requests

        self.base_url = (base_url or os.environ.get(ENV_ENDPOINT) or DEFAULT_ENDPOINT).rstrip("/") + "/"
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY)
        self.page_size = page_size
        self.delay = delay
        self.timeout = timeout
        self._session = requests.Session()
        self._last = 0.0

    def get(self, endpoint: str, params: Dict[str, str]) -> str:
        import requests

        wait = self._last + self.delay - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        params = dict(params)
        if self.api_key:
            params["api_key"] = self.api_key
        try:
            resp = self._session.get(self.base_url + endpoint + ".fcgi", params=params, timeout=self.timeout)
        except requests.RequestException as e:
            raise TransportError(str(e)) from e
        finally:
            self._last = time.monotonic()
        if resp.status_code == 429:
            after = resp.headers.get("Retry-After")
            raise RateLimited("rate limited by server", float(after) if after and after.isdigit() else None)
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code} from {endpoint}")
        return resp.text


def fixture_name(endpoint: str, params: Dict[str, str]) -> str:
    return f"{endpoint}_{params.get('retstart', 0)}.xml"


class FixtureTransport:
    """Replays recorded responses from a directory."""

    def __init__(self, directory, page_size: int = 100):
        self.directory = Path(directory)
        self.page_size = page_size

    def get(self, endpoint: str, params: Dict[str, str]) -> str:
        path = self.directory / fixture_name(endpoint, params)
        if not path.exists():
            raise TransportError(f"no recorded response {path.name}")
        return path.read_text(encoding="utf-8")


class RecordingTransport:
    """Wraps another transport and stores every response as a fixture."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = Path(directory)
        self.page_size = getattr(inner, "page_size", 100)

    def get(self, endpoint: str, params: Dict[str, str]) -> str:
        text = self.inner.get(endpoint, params)
        self.directory.mkdir(parents=True, exist_ok=True)
        (self.directory / fixture_name(endpoint, params)).write_text(text, encoding="utf-8")
        return text


# ---------------------------------------------------------------------------
# parsing


def _xml(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as e:
        raise ParseError(f"malformed XML: {e}") from e


def _text(el: Optional[ET.Element]) -> str:
    return " ".join("".join(el.itertext()).split()) if el is not None else ""


def parse_search(text: str) -> Tuple[int, List[str]]:
    """``(total hit count, ids on this page)`` from a search response."""
    root = _xml(text)
    count = root.findtext("Count")
    if root.tag != "eSearchResult" or count is None:
        raise ParseError("not a search result")
    return int(count), [e.text.strip() for e in root.iterfind("IdList/Id") if e.text]


def parse_articles(text: str) -> List[RawRecord]:
    root = _xml(text)
    if root.tag != "PubmedArticleSet":
        raise ParseError("not an article set")
    out = []
    for art in root.iterfind("PubmedArticle"):
        pmid = art.findtext("MedlineCitation/PMID")
        if not pmid:
            raise ParseError("article without PMID")
        a = art.find("MedlineCitation/Article")
        if a is None:
            raise ParseError(f"{pmid}: article element missing")
        sections = tuple(
            (p.get("Label") or "", _text(p)) for p in a.iterfind("Abstract/AbstractText")
        )
        types = frozenset(_text(t) for t in a.iterfind("PublicationTypeList/PublicationType"))
        out.append(RawRecord(pmid.strip(), _text(a.find("ArticleTitle")), sections, types))
    return out


def fetch(query: str, transport, page_size: Optional[int] = None) -> List[RawRecord]:
    """All records matching ``query``, paging through search and fetch."""
    size = page_size or getattr(transport, "page_size", 100)
    ids: List[str] = []
    start, count = 0, None
    while count is None or start < count:
        count, page = parse_search(transport.get("esearch", {
            "db": "pubmed", "term": query, "retstart": str(start), "retmax": str(size),
        }))
        ids += page
        if not page:
            break
        start += size
    records: List[RawRecord] = []
    for start in range(0, len(ids), size):
        batch = ids[start:start + size]
        records += parse_articles(transport.get("efetch", {
            "db": "pubmed", "id": ",".join(batch), "retmode": "xml", "rettype": "abstract",
            "retstart": str(start),
        }))
    log.info("fetched %d of %d records", len(records), len(ids))
    return records


def filter_records(records: Iterable[RawRecord], include_ids: Optional[Iterable[str]]) -> List[RawRecord]:
    """Keep only allow-listed ids (all records when ``include_ids`` is None)."""
    records = list(records)
    if include_ids is None:
        return records
    allowed = {i.strip() for i in include_ids if i.strip()}
    return [r for r in records if r.id in allowed]


def to_abstract(record: RawRecord) -> Abstract:
    """Unannotated abstract; structured when at least two sections carry headings."""
    sections = [(h.strip(), " ".join(b.split())) for h, b in record.labeled_sections]
    sections = [(h, b) for h, b in sections if b]
    if not sections:
        raise EmptyBody(f"{record.id}: abstract has no text")
    return make_abstract(record.id, " ".join(record.title.split()), sections)
