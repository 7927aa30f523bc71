from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, List, Optional

from vivada.corpus import Dataset, read_splits
from vivada.corpus.dataset import SPLITS_FILE
from vivada.errors import LeakageError, UsageError
from vivada.models import Document, Partition
from vivada.util import PathLike


@dataclass
class SplitHandle:
    """The documents of one partition. Test documents only come out through `reveal_for_evaluation`."""

    partition: Partition
    _documents: List[Document] = field(repr=False)

    def __len__(self) -> int:
        return len(self._documents)

    @property
    def sealed(self) -> bool:
        return self.partition is Partition.TEST

    @property
    def documents(self) -> List[Document]:
        if self.sealed:
            raise LeakageError("test documents were requested before evaluation")
        return list(self._documents)

    def reveal_for_evaluation(self) -> List[Document]:
        return list(self._documents)

    def filter(self, keep: Callable[[Document], bool]) -> "SplitHandle":
        return SplitHandle(self.partition, [d for d in self._documents if keep(d)])

    @classmethod
    def of(cls, partition: Partition, documents: Iterable[Document]) -> "SplitHandle":
        return cls(partition, list(documents))


def load_split_handles(directory: PathLike, dataset: Optional[Dataset] = None) -> dict[Partition, SplitHandle]:
    """Handles for every partition listed in `<directory>/splits.json`."""
    path = Path(directory) / SPLITS_FILE
    if not path.exists():
        raise UsageError(f"{directory} has no {SPLITS_FILE}; run `split` first")
    dataset = dataset or Dataset.read(directory)
    by_id = {d.id: d for d in dataset.documents}
    handles = {}
    for partition, split in read_splits(path).items():
        missing = [i for i in split.document_ids if i not in by_id]
        if missing:
            raise UsageError(f"{path}: {len(missing)} {partition.value} ids are not in the dataset, e.g. {missing[0]}")
        handles[partition] = SplitHandle.of(partition, (by_id[i] for i in split.document_ids))
    for partition in (Partition.TRAIN, Partition.TEST):
        if partition not in handles or not len(handles[partition]):
            raise UsageError(f"{path}: the {partition.value} split is missing or empty")
    handles.setdefault(Partition.VALIDATION, SplitHandle.of(Partition.VALIDATION, []))
    return handles
