from vivada.models.enums import ExperimentKind, Label, LinkClass, ModelKind, Partition, Polarity, Source
from vivada.models.document import Document, document_id, source_of
from vivada.models.seed import Edge, Seed
from vivada.models.annotation import AnnotationRecord
from vivada.models.encoded import EncodedDocument
from vivada.models.split import DatasetSplit, SplitStats
from vivada.models.predictions import PredictionSet
