# Generated by Django 5.2.6 on 2026-10-17 09:12

import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='CensusRecord',
            fields=[
                ('record_id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('key', models.CharField(choices=[('joint', 'Joint per/det'), ('values', 'Value classes'), ('nr', 'Compound rank N^(r)'), ('vr', 'Bilinear zeros V^(r)'), ('split3', '3x3 split'), ('recursion', '|P_n| by recursion')], max_length=16)),
                ('p', models.PositiveIntegerField()),
                ('k', models.PositiveSmallIntegerField(default=1)),
                ('q', models.PositiveIntegerField()),
                ('n', models.PositiveSmallIntegerField()),
                ('total', models.CharField(max_length=255)),
                ('counts', models.JSONField(default=dict)),
                ('summary', models.JSONField(default=dict)),
                ('elapsed_ms', models.FloatField(default=0.0)),
                ('workers', models.PositiveIntegerField(default=1)),
                ('backend', models.CharField(choices=[('local', 'Local'), ('celery', 'Celery')], default='local', max_length=10)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'db_table': 'census_record',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['key', 'p', 'k', 'n'], name='idx_census_lookup')],
            },
        ),
    ]
