import re

SCHEMA_VERSION = 1
CHECKPOINT_MAGIC = b"CTRV"
CHECKPOINT_VERSION = 1

PAD_TOKEN = "<pad>"
OOV_TOKEN = "<oov>"
PAD_INDEX = 0
OOV_INDEX = 1

# Tokens: unicode letters and digits, underscores split like punctuation
WORD_RE = re.compile(r"[^\W_]+")
WHITESPACE_RE = re.compile(r"\s+")
# Terminator runs only count when followed by whitespace or end of text
SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)|\n+")
LAST_WORD_RE = re.compile(r"([^\W\d_][\w.]*)$")

ABBREVIATIONS = frozenset(
    {"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc"}
    | {"e.g", "i.e", "u.s", "u.k", "inc", "ltd", "corp", "approx"}
)
# ordinary words that only abbreviate when a number follows ("No. 5", "Fig. 2")
NUMBERED_ABBREVIATIONS = frozenset({"no", "fig", "vol"})

# Text pipeline defaults
VOCAB_MAX_SIZE = 50_000
VOCAB_MIN_FREQ = 2
MAX_SENTENCES = 30
MAX_WORDS_PER_SENTENCE = 50
MAX_TOKENS = 400
EMBEDDING_DIM = 300
MISSING_EMBEDDING_RANGE = 0.25

# Network shapes
CNN_WINDOWS = (2, 3, 4)
CNN_FILTERS = 128
GRU_HIDDEN = 50
DROPOUT = 0.5
RECURRENT_INIT_RANGE = 0.1

# Optimisation
BATCH_SIZE = 64
LEARNING_RATE = 1e-3
L2_LAMBDA = 1e-3
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
EPOCHS = 5
PATIENCE = 2

# Lexical baselines
DIRICHLET_MU = 2000.0
TFIDF_LAMBDA = 1e-4
TFIDF_ITERATIONS = 500
TFIDF_STEP = 0.5

# Evaluation
BOOTSTRAP_RESAMPLES = 1000
CONFIDENCE_LEVEL = 0.95
ANNOTATION_SCALE = (1.0, 2.0, 3.0, 4.0)
ANNOTATION_MIDPOINT = 2.5
MIN_ANNOTATIONS = 3

# Crawling
WIKI_HOST_SUFFIX = "wikipedia.org"
DEFAULT_WIKI_BASE = "https://en.wikipedia.org"
RANDOM_ARTICLE_PATH = "/wiki/Special:Random"
USER_AGENT = "vivada-crawler/0.1 (+research; polite)"
LINK_CLASSES = ("see-also", "references", "external-links")
MAX_HOPS = 2
HOST_DELAY = 1.0
FETCH_TIMEOUT = 10.0
FETCH_RETRIES = 2
MAX_PAGES = 100_000
NONTEXT_TAGS = ("script", "style", "nav", "header", "footer", "noscript", "aside", "form")
TEXT_TAGS = ("h1", "h2", "h3", "h4", "h5", "h6", "p", "li", "blockquote")

# Link prefixes on the seed list page that are not articles
WIKI_NAMESPACES = frozenset(
    {
        "file",
        "image",
        "media",
        "category",
        "template",
        "help",
        "portal",
        "wikipedia",
        "wp",
        "talk",
        "user",
        "special",
        "draft",
        "module",
        "mediawiki",
    }
)
TAG_RE = re.compile(r"<[^>]*>")

# Experiments
TOPIC_FOLDS = 10
LOG_LEVEL_ENV = "VIVADA_LOG_LEVEL"
