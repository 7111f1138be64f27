// Minimal JSON Schema checker covering exactly the subset the service's
// published draft-decision schema uses (draft 2020-12 keywords: type, enum,
// const, properties, required, additionalProperties, items, prefixItems,
// minItems, maxItems, minLength, minimum, maximum, allOf, if/then).
// Client-side validation fails fast; the server stays authoritative.

import type { JsonSchema } from "./types";

type Json = null | boolean | number | string | Json[] | { [key: string]: Json };

function jsonType(value: Json): string {
  if (value === null) return "null";
  if (Array.isArray(value)) return "array";
  return typeof value; // boolean | number | string | object
}

function matchesType(value: Json, expected: string): boolean {
  const actual = jsonType(value);
  if (expected === "integer") return actual === "number" && Number.isInteger(value as number);
  return actual === expected;
}

function deepEqual(a: Json, b: Json): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

export function validateAgainstSchema(
  schema: JsonSchema,
  value: Json,
  path = "$",
): string[] {
  const errors: string[] = [];

  const type = schema["type"] as string | string[] | undefined;
  if (type !== undefined) {
    const allowed = Array.isArray(type) ? type : [type];
    if (!allowed.some((t) => matchesType(value, t))) {
      errors.push(`${path}: expected ${allowed.join(" or ")}, got ${jsonType(value)}`);
      return errors; // further keyword checks assume the right shape
    }
  }

  const enumValues = schema["enum"] as Json[] | undefined;
  if (enumValues !== undefined && !enumValues.some((v) => deepEqual(v, value))) {
    errors.push(`${path}: value not in enum`);
  }
  const constValue = schema["const"] as Json | undefined;
  if (constValue !== undefined && !deepEqual(constValue, value)) {
    errors.push(`${path}: value does not match const`);
  }

  if (typeof value === "number") {
    const minimum = schema["minimum"] as number | undefined;
    const maximum = schema["maximum"] as number | undefined;
    if (minimum !== undefined && value < minimum) errors.push(`${path}: below minimum ${minimum}`);
    if (maximum !== undefined && value > maximum) errors.push(`${path}: above maximum ${maximum}`);
  }

  if (typeof value === "string") {
    const minLength = schema["minLength"] as number | undefined;
    if (minLength !== undefined && value.length < minLength) {
      errors.push(`${path}: shorter than minLength ${minLength}`);
    }
  }

  if (Array.isArray(value)) {
    const minItems = schema["minItems"] as number | undefined;
    const maxItems = schema["maxItems"] as number | undefined;
    if (minItems !== undefined && value.length < minItems) {
      errors.push(`${path}: fewer than ${minItems} items`);
    }
    if (maxItems !== undefined && value.length > maxItems) {
      errors.push(`${path}: more than ${maxItems} items`);
    }
    const prefixItems = schema["prefixItems"] as JsonSchema[] | undefined;
    if (prefixItems) {
      prefixItems.forEach((itemSchema, i) => {
        if (i < value.length) {
          errors.push(...validateAgainstSchema(itemSchema, value[i] as Json, `${path}[${i}]`));
        }
      });
    }
    const items = schema["items"] as JsonSchema | undefined;
    if (items) {
      const start = prefixItems ? prefixItems.length : 0;
      for (let i = start; i < value.length; i++) {
        errors.push(...validateAgainstSchema(items, value[i] as Json, `${path}[${i}]`));
      }
    }
  }

  if (jsonType(value) === "object") {
    const record = value as { [key: string]: Json };
    const properties = (schema["properties"] ?? {}) as Record<string, JsonSchema>;
    const required = (schema["required"] ?? []) as string[];
    for (const key of required) {
      if (!(key in record)) errors.push(`${path}: missing required field "${key}"`);
    }
    for (const [key, item] of Object.entries(record)) {
      const propSchema = properties[key];
      if (propSchema) {
        errors.push(...validateAgainstSchema(propSchema, item, `${path}.${key}`));
      } else if (schema["additionalProperties"] === false) {
        errors.push(`${path}: unknown field "${key}"`);
      }
    }
  }

  const allOf = schema["allOf"] as JsonSchema[] | undefined;
  if (allOf) {
    for (const sub of allOf) errors.push(...validateAgainstSchema(sub, value, path));
  }

  const ifSchema = schema["if"] as JsonSchema | undefined;
  const thenSchema = schema["then"] as JsonSchema | undefined;
  if (ifSchema && thenSchema) {
    if (validateAgainstSchema(ifSchema, value, path).length === 0) {
      errors.push(...validateAgainstSchema(thenSchema, value, path));
    }
  }

  return errors;
}

export function parseAndValidate(text: string, schema: JsonSchema): {
  payload: Json | null;
  errors: string[];
} {
  let payload: Json;
  try {
    payload = JSON.parse(text) as Json;
  } catch (exc) {
    return { payload: null, errors: [`not valid JSON: ${(exc as Error).message}`] };
  }
  return { payload, errors: validateAgainstSchema(schema, payload) };
}
