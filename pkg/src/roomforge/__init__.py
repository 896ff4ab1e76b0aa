"""roomforge: the non-neural machinery of an interior-scene diffusion pipeline.

Subpackages:
    filtering   - quality-label schema, discrimination rules, screening
    bucketing   - multi-aspect buckets, assignment, epoch schedules
    captioning  - caption template, BPE tokenization, 77-token chunking
    curation    - designer ratings, top-fraction retention, data tiers
    fusion      - checkpoint archive IO and weighted merging
    metrics     - the seven automated evaluation metrics
    evalproto   - dual gate, GSB protocol, event log, HTTP service
    cli         - the roomforge command
"""

__version__ = "0.1.0"
