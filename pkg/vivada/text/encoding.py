from typing import List, Sequence

from vivada import constants as C
from vivada.config import EncodingLimits
from vivada.models.document import Document
from vivada.models.encoded import EncodedDocument
from vivada.text.tokenize import split_sentences, tokenize
from vivada.text.vocabulary import Vocabulary


def encode_text(doc_id: str, text: str, vocab: Vocabulary, limits: EncodingLimits) -> EncodedDocument:
    sentences = []
    for sentence in split_sentences(text):
        indices = [vocab.lookup(t) for t in tokenize(sentence)][: limits.max_words]
        if indices:
            sentences.append(indices)
        if len(sentences) == limits.max_sentences:
            break

    flat = [vocab.lookup(t) for t in tokenize(text)][: limits.max_tokens]
    return EncodedDocument(
        doc_id=doc_id,
        sentences=sentences,
        tokens=flat + [C.PAD_INDEX] * (limits.max_tokens - len(flat)),
        length=len(flat),
    )


def encode_document(doc: Document, vocab: Vocabulary, limits: EncodingLimits) -> EncodedDocument:
    return encode_text(doc.id, doc.text, vocab, limits)


def decode(indices: Sequence[int], vocab: Vocabulary) -> List[str]:
    """Indices back to tokens, padding dropped."""
    return [vocab.tokens[i] for i in indices if i != C.PAD_INDEX]
