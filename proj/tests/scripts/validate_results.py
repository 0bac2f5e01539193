"""Validates a results.json file against the shipped JSON schema."""
import json
import sys

import jsonschema


def main() -> int:
    schema_path, results_path = sys.argv[1], sys.argv[2]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    with open(results_path, encoding="utf-8") as f:
        results = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(results), key=str)
    for e in errors:
        print(f"{list(e.absolute_path)}: {e.message}")
    if errors:
        return 1
    print(f"{results_path}: valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
