"""Write the JSON Schema of every document model to schemas/."""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.schemas import DOCUMENT_MODELS  # noqa: E402

OUTPUT_DIR = Path(__file__).resolve().parent.parent / 'schemas'


def main():
    OUTPUT_DIR.mkdir(exist_ok=True)
    for name, model in DOCUMENT_MODELS.items():
        path = OUTPUT_DIR / f'{name}.schema.json'
        path.write_text(json.dumps(model.model_json_schema(), sort_keys=True, indent=2) + '\n')
        print(f'✅ {path.name}')


if __name__ == '__main__':
    main()
