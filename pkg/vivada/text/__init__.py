from vivada.text.tokenize import split_sentences, tokenize
from vivada.text.vocabulary import Vocabulary, build_vocabulary
from vivada.text.embeddings import EmbeddingTable, load_embeddings, write_embeddings
from vivada.text.encoding import decode, encode_document, encode_text
