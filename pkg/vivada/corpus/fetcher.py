import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol
from urllib.parse import urlsplit
from urllib.robotparser import RobotFileParser

import requests

from vivada.config import CrawlPolicy

logger = logging.getLogger(__name__)


@dataclass
class FetchResult:
    url: str
    # after redirects; differs from `url` for Special:Random
    final_url: str
    status: Optional[int] = None
    html: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.html is not None


class Fetcher(Protocol):
    def fetch(self, url: str) -> FetchResult: ...


class HttpFetcher:
    """Polite HTTP client: robots exclusion, a per-host delay and bounded retries.

    Safe to share between crawler worker threads.
    """

    policy: CrawlPolicy
    session: requests.Session

    def __init__(
        self,
        policy: CrawlPolicy,
        session: Optional[requests.Session] = None,
        proxies: Optional[dict[str, str]] = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.policy = policy
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = policy.user_agent
        if proxies:
            self.session.proxies.update(proxies)
        self._sleep = sleep
        self._clock = clock
        self._lock = threading.Lock()
        self._next_slot: dict[str, float] = {}
        self._robots: dict[str, RobotFileParser] = {}
        self.requests_made = 0

    # -- politeness -----------------------------------------------------------

    def _wait_for(self, host: str):
        with self._lock:
            now = self._clock()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self.policy.host_delay
            self.requests_made += 1
        if slot > now:
            self._sleep(slot - now)

    def _robots_for(self, url: str) -> RobotFileParser:
        parts = urlsplit(url)
        origin = f"{parts.scheme}://{parts.netloc}"
        with self._lock:
            parser = self._robots.get(origin)
        if parser is not None:
            return parser

        parser = RobotFileParser(origin + "/robots.txt")
        self._wait_for(parts.netloc)
        try:
            response = self.session.get(origin + "/robots.txt", timeout=self.policy.timeout)
            if response.status_code in (401, 403):
                parser.disallow_all = True
            elif response.status_code >= 400:
                parser.allow_all = True
            else:
                parser.parse(response.text.splitlines())
        except requests.RequestException as e:
            logger.debug("robots.txt unavailable for %s: %s", origin, e)
            parser.allow_all = True

        with self._lock:
            return self._robots.setdefault(origin, parser)

    def allowed(self, url: str) -> bool:
        if not self.policy.respect_robots:
            return True
        return self._robots_for(url).can_fetch(self.policy.user_agent, url)

    # -- fetching -------------------------------------------------------------

    def fetch(self, url: str) -> FetchResult:
        if not self.allowed(url):
            return FetchResult(url=url, final_url=url, error="disallowed by robots.txt")

        host = urlsplit(url).netloc
        error = "no attempt made"
        for attempt in range(self.policy.retries + 1):
            self._wait_for(host)
            try:
                response = self.session.get(url, timeout=self.policy.timeout, allow_redirects=True)
            except requests.RequestException as e:
                error = f"{type(e).__name__}: {e}"
                logger.debug("attempt %d for %s failed: %s", attempt + 1, url, error)
                continue

            if response.status_code == 429 or response.status_code >= 500:
                error = f"HTTP {response.status_code}"
                continue
            if response.status_code >= 400:
                error = f"HTTP {response.status_code}"
                return FetchResult(url=url, final_url=response.url, status=response.status_code, error=error)
            content_type = response.headers.get("Content-Type", "text/html")
            if "html" not in content_type:
                error = f"not HTML ({content_type})"
                return FetchResult(url=url, final_url=response.url, status=response.status_code, error=error)
            return FetchResult(url=url, final_url=response.url, status=response.status_code, html=response.text)

        return FetchResult(url=url, final_url=url, error=error)
