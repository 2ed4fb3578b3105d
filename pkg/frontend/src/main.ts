import { mountAnnotationApp } from './app.js';

function required(params: URLSearchParams, name: string): string {
  const value = params.get(name);
  if (!value) {
    throw new Error(`missing ?${name}= query parameter`);
  }
  return value;
}

const params = new URLSearchParams(window.location.search);
const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app container');
}

try {
  mountAnnotationApp(root, {
    apiBase: params.get('api') ?? window.location.origin,
    sessionId: required(params, 'session'),
    annotatorId: required(params, 'annotator'),
  });
} catch (error) {
  root.textContent = String(error);
}
